#pragma once

// Test-only oracles. Each one re-derives a result through a deliberately
// different route than the library (explicit set algebra, normal
// equations, Jacobi rotations) and must stay independent of the
// implementation it checks.

#include "synergylab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracle {

using synergylab::PaperNode;

struct CiterCounts {
    uint32_t n_i = 0, n_j = 0, n_k = 0;
};

// Set-algebra disruption classification straight from an edge list.
// Materializes the three citer sets explicitly.
inline CiterCounts classify(const std::vector<std::pair<PaperNode, PaperNode>>& edges,
                            const std::map<PaperNode, int32_t>& year_of, PaperNode fp, int l,
                            int32_t window, bool discard_sub_threshold = false) {
    auto year = [&](PaperNode p) -> int32_t {
        auto it = year_of.find(p);
        return it == year_of.end() ? synergylab::kNoYear : it->second;
    };
    const int32_t t = year(fp);
    if (t == synergylab::kNoYear) throw std::runtime_error("oracle: fp has no year");
    auto in_window = [&](PaperNode q) {
        int32_t y = year(q);
        if (y == synergylab::kNoYear || y < t) return false;
        return window < 0 || y <= t + window;
    };

    std::set<PaperNode> refs, citers_of_fp;
    for (const auto& [src, dst] : edges) {
        if (src == dst) continue; // self-citations are dropped upstream
        if (src == fp) refs.insert(dst);
        if (dst == fp) citers_of_fp.insert(src);
    }

    std::set<PaperNode> i_set, j_set, k_set;
    for (PaperNode q : citers_of_fp) {
        if (!in_window(q)) continue;
        size_t shared = 0;
        for (const auto& [src, dst] : edges)
            if (src == q && refs.count(dst)) ++shared;
        if (shared >= size_t(l)) j_set.insert(q);
        else if (shared == 0 || !discard_sub_threshold) i_set.insert(q);
    }
    for (const auto& [src, dst] : edges) {
        if (src == fp || !refs.count(dst)) continue;
        if (citers_of_fp.count(src)) continue;
        if (!in_window(src)) continue;
        k_set.insert(src);
    }
    CiterCounts c;
    c.n_i = uint32_t(i_set.size());
    c.n_j = uint32_t(j_set.size());
    c.n_k = uint32_t(k_set.size());
    return c;
}

// OLS through explicit normal equations with Gaussian elimination; no
// shared code with the Eigen-based implementation.
inline std::vector<double> ols_normal_equations(const std::vector<double>& y,
                                                const std::vector<std::vector<double>>& X) {
    const size_t n = y.size(), k = X[0].size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (size_t r = 0; r < k; ++r) {
        for (size_t c = 0; c < k; ++c)
            for (size_t i = 0; i < n; ++i) a[r][c] += X[i][r] * X[i][c];
        for (size_t i = 0; i < n; ++i) a[r][k] += X[i][r] * y[i];
    }
    for (size_t col = 0; col < k; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (std::fabs(a[col][col]) < 1e-12) throw std::runtime_error("oracle: singular system");
        for (size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> beta(k);
    for (size_t r = 0; r < k; ++r) beta[r] = a[r][k] / a[r][r];
    return beta;
}

// Cyclic Jacobi eigensolver for small symmetric matrices; returns
// eigenvalues (descending) and optionally eigenvectors as columns.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    const size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-18) continue;
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    const size_t n = a.size();
    std::map<std::pair<uint32_t, uint32_t>, double> joint;
    std::map<uint32_t, double> ma, mb;
    for (size_t i = 0; i < n; ++i) {
        joint[{a[i], b[i]}] += 1;
        ma[a[i]] += 1;
        mb[b[i]] += 1;
    }
    auto choose2 = [](double m) { return m * (m - 1) / 2.0; };
    double sum_joint = 0, sum_a = 0, sum_b = 0;
    for (const auto& [k, v] : joint) sum_joint += choose2(v);
    for (const auto& [k, v] : ma) sum_a += choose2(v);
    for (const auto& [k, v] : mb) sum_b += choose2(v);
    const double total = choose2(double(n));
    const double expected = sum_a * sum_b / total;
    const double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return 1.0;
    return (sum_joint - expected) / (max_index - expected);
}

} // namespace oracle
