#include "synergylab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace synergylab {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             const NelderMeadOptions& opts) {
    const size_t n = x0.size();
    const size_t m = n + 1;

    std::vector<std::vector<double>> vertex(m, std::vector<double>(x0.begin(), x0.end()));
    for (size_t i = 1; i < m; ++i) vertex[i][i - 1] += step[i - 1];
    std::vector<double> fv(m);
    for (size_t i = 0; i < m; ++i) fv[i] = f(vertex[i]);

    std::vector<size_t> order(m);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    NelderMeadResult res;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t best = order[0], worst = order[m - 1], second_worst = order[m - 2];

        double diameter = 0.0;
        for (size_t i = 0; i < m; ++i)
            for (size_t d = 0; d < n; ++d)
                diameter = std::max(diameter, std::fabs(vertex[i][d] - vertex[best][d]));
        if (diameter < opts.tolerance) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (size_t i = 0; i < m; ++i) {
            if (i == worst) continue;
            for (size_t d = 0; d < n; ++d) centroid[d] += vertex[i][d];
        }
        for (size_t d = 0; d < n; ++d) centroid[d] /= double(n);

        for (size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - vertex[worst][d]);
        double fr = f(xr);

        if (fr < fv[best]) {
            for (size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - vertex[worst][d]);
            double fe = f(xe);
            if (fe < fr) { vertex[worst] = xe; fv[worst] = fe; }
            else         { vertex[worst] = xr; fv[worst] = fr; }
        } else if (fr < fv[second_worst]) {
            vertex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside)
                for (size_t d = 0; d < n; ++d) xc[d] = centroid[d] + 0.5 * (xr[d] - centroid[d]);
            else
                for (size_t d = 0; d < n; ++d) xc[d] = centroid[d] + 0.5 * (vertex[worst][d] - centroid[d]);
            double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                vertex[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    for (size_t d = 0; d < n; ++d)
                        vertex[i][d] = vertex[best][d] + 0.5 * (vertex[i][d] - vertex[best][d]);
                    fv[i] = f(vertex[i]);
                }
            }
        }
    }

    size_t best = 0;
    for (size_t i = 1; i < m; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = vertex[best];
    res.fx = fv[best];
    res.iterations = iter;
    return res;
}

} // namespace synergylab
