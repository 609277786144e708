#include "synergylab/inference.hpp"

#include "synergylab/error.hpp"
#include "synergylab/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace synergylab {

OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const OlsOptions& opts) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) throw ConfigError("ols: y and X row counts differ");
    if (n <= k) throw DataError("ols: need n_obs > n_regressors");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        std::string cols;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < k; ++i)
            cols += (cols.empty() ? "" : ", ") + std::to_string(perm[i]);
        throw DataError("ols: rank-deficient design, collinear column(s) " + cols);
    }

    OlsResult r;
    r.n_obs = static_cast<size_t>(n);
    r.coefficients = qr.solve(y);
    Eigen::VectorXd resid = y - X * r.coefficients;
    const double rss = resid.squaredNorm();
    const double df = double(n - k);
    r.sigma2 = rss / df;

    Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    Eigen::MatrixXd cov;
    if (opts.robust) {
        // HC1: sandwich with an n/(n-k) small-sample factor
        Eigen::MatrixXd meat = X.transpose() * resid.array().square().matrix().asDiagonal() * X;
        cov = xtx_inv * meat * xtx_inv * (double(n) / df);
    } else {
        cov = r.sigma2 * xtx_inv;
    }

    boost::math::students_t_distribution<double> tdist(df);
    const double tcrit = boost::math::quantile(tdist, 0.5 + opts.ci_level / 2.0);

    r.standard_errors.resize(k);
    r.t_stats.resize(k);
    r.p_values.resize(k);
    r.ci_low.resize(k);
    r.ci_high.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double se = std::sqrt(std::max(cov(i, i), 0.0));
        r.standard_errors[i] = se;
        double t = se > 0 ? r.coefficients[i] / se : 0.0;
        r.t_stats[i] = t;
        r.p_values[i] = se > 0 ? 2.0 * boost::math::cdf(boost::math::complement(tdist, std::fabs(t)))
                               : (r.coefficients[i] == 0.0 ? 1.0 : 0.0);
        r.ci_low[i] = r.coefficients[i] - tcrit * se;
        r.ci_high[i] = r.coefficients[i] + tcrit * se;
    }

    const double mean_y = y.mean();
    const double tss = (y.array() - mean_y).matrix().squaredNorm();
    r.r_squared = tss > 0 ? 1.0 - rss / tss : (rss == 0 ? 1.0 : 0.0);
    return r;
}

namespace {

// Closed-form single-mediator paths from moment sums; used by the
// bootstrap loop where a full factorization per resample would be waste.
struct PathMoments {
    double a, b, c, c_prime;
};

PathMoments paths_from_moments(double n, double sg, double sm, double sy, double sgg, double smm,
                               double sgm, double sgy, double smy) {
    const double vg = sgg - sg * sg / n;
    const double vm = smm - sm * sm / n;
    const double cgm = sgm - sg * sm / n;
    const double cgy = sgy - sg * sy / n;
    const double cmy = smy - sm * sy / n;
    PathMoments p;
    p.c = cgy / vg;
    p.a = cgm / vg;
    const double det = vg * vm - cgm * cgm;
    p.b = (vg * cmy - cgm * cgy) / det;
    p.c_prime = (vm * cgy - cgm * cmy) / det;
    return p;
}

} // namespace

MediationResult mediate(const Eigen::VectorXd& g, const Eigen::VectorXd& m,
                        const Eigen::VectorXd& y, int n_boot, uint64_t seed) {
    const auto n = g.size();
    if (m.size() != n || y.size() != n) throw ConfigError("mediate: vectors must align");
    if (n < 4) throw DataError("mediate: too few observations");

    // mediator must vary independently of the treatment
    const double vg = (g.array() - g.mean()).matrix().squaredNorm();
    const double vm = (m.array() - m.mean()).matrix().squaredNorm();
    const double cgm = ((g.array() - g.mean()) * (m.array() - m.mean())).sum();
    if (vg <= 0) throw DataError("mediate: treatment has no variance");
    if (vm <= 0 || cgm * cgm >= vg * vm * (1.0 - 1e-12))
        throw DataError("mediate: mediator not identified (collinear with treatment)");

    Eigen::MatrixXd X1(n, 2), X2(n, 3);
    X1.col(0).setOnes();
    X1.col(1) = g;
    X2.col(0).setOnes();
    X2.col(1) = g;
    X2.col(2) = m;

    OlsResult total = ols(y, X1);
    OlsResult am = ols(m, X1);
    OlsResult full = ols(y, X2);

    MediationResult r;
    r.n_obs = static_cast<size_t>(n);
    r.n_boot = n_boot;
    r.total_effect = total.coefficients[1];
    r.p_total = total.p_values[1];
    r.path_a = am.coefficients[1];
    r.p_a = am.p_values[1];
    r.direct_effect = full.coefficients[1];
    r.p_direct = full.p_values[1];
    r.path_b = full.coefficients[2];
    r.p_b = full.p_values[2];
    r.indirect_effect = r.path_a * r.path_b;

    const double scale = std::max({std::fabs(r.total_effect), std::fabs(r.indirect_effect), 1e-12});
    r.proportion_defined = std::fabs(r.total_effect) > 1e-6 * scale;
    r.proportion_mediated = r.proportion_defined ? r.indirect_effect / r.total_effect : 0.0;

    // percentile bootstrap on a*b; one derived stream per resample keeps
    // the result independent of scheduling
    std::vector<double> boots(n_boot);
    #pragma omp parallel for schedule(static)
    for (int bi = 0; bi < n_boot; ++bi) {
        Rng rng = Rng::stream(seed, static_cast<uint64_t>(bi));
        double sg = 0, sm = 0, sy = 0, sgg = 0, smm = 0, sgm = 0, sgy = 0, smy = 0;
        for (Eigen::Index t = 0; t < n; ++t) {
            auto idx = static_cast<Eigen::Index>(rng.next_below(static_cast<uint64_t>(n)));
            double gv = g[idx], mv = m[idx], yv = y[idx];
            sg += gv; sm += mv; sy += yv;
            sgg += gv * gv; smm += mv * mv; sgm += gv * mv;
            sgy += gv * yv; smy += mv * yv;
        }
        auto p = paths_from_moments(double(n), sg, sm, sy, sgg, smm, sgm, sgy, smy);
        boots[bi] = p.a * p.b;
    }
    std::sort(boots.begin(), boots.end());
    auto qidx = [&](double q) {
        size_t rank = static_cast<size_t>(std::ceil(q * n_boot));
        rank = std::min(std::max<size_t>(rank, 1), boots.size());
        return rank - 1;
    };
    r.boot_ci_low = boots[qidx(0.025)];
    r.boot_ci_high = boots[qidx(0.975)];
    size_t n_le = 0, n_ge = 0;
    for (double v : boots) {
        if (v <= 0) ++n_le;
        if (v >= 0) ++n_ge;
    }
    r.p_indirect = std::min(1.0, 2.0 * double(std::min(n_le, n_ge)) / double(n_boot));

    const bool indirect_sig = r.boot_ci_low > 0 || r.boot_ci_high < 0;
    const bool direct_sig = r.p_direct < 0.05;
    r.suppression = indirect_sig && direct_sig &&
                    std::signbit(r.indirect_effect) != std::signbit(r.direct_effect);
    return r;
}

OlsResult moderate(const Eigen::VectorXd& y, const Eigen::VectorXd& g, const Eigen::VectorXd& r,
                   const Eigen::VectorXd& w, const OlsOptions& opts) {
    const auto n = y.size();
    if (g.size() != n || r.size() != n || w.size() != n)
        throw ConfigError("moderate: vectors must align");
    const double vw = (w.array() - w.mean()).matrix().squaredNorm();
    if (vw <= 0) throw DataError("moderate: degenerate moderator (constant W)");
    Eigen::MatrixXd X(n, 5);
    X.col(0).setOnes();
    X.col(1) = g;
    X.col(2) = r;
    X.col(3) = w;
    X.col(4) = r.cwiseProduct(w);
    return ols(y, X, opts);
}

Eigen::VectorXd logistic_fit(const std::vector<uint8_t>& label, const Eigen::MatrixXd& X,
                             int max_iter, double tol) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (static_cast<Eigen::Index>(label.size()) != n)
        throw ConfigError("logistic_fit: label/X mismatch");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd eta(n), p(n), wz(n);
    for (int it = 0; it < max_iter; ++it) {
        eta = X * beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            double e = std::clamp(eta[i], -30.0, 30.0);
            p[i] = 1.0 / (1.0 + std::exp(-e));
        }
        Eigen::VectorXd w = (p.array() * (1.0 - p.array())).max(1e-10).matrix();
        Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
        Eigen::VectorXd grad(n);
        for (Eigen::Index i = 0; i < n; ++i) grad[i] = double(label[i]) - p[i];
        Eigen::VectorXd delta = xtwx.ldlt().solve(X.transpose() * grad);
        beta += delta;
        if (delta.cwiseAbs().maxCoeff() < tol) break;
    }
    return beta;
}

MatchResult psm_att(const Eigen::VectorXd& y, const std::vector<uint8_t>& treated,
                    const Eigen::MatrixXd& covariates,
                    const std::vector<std::string>& covariate_names, double caliper_mult) {
    const auto n = y.size();
    if (static_cast<Eigen::Index>(treated.size()) != n || covariates.rows() != n)
        throw ConfigError("psm_att: inputs must align");
    if (covariate_names.size() != static_cast<size_t>(covariates.cols()))
        throw ConfigError("psm_att: covariate names must match columns");

    size_t n_t = 0;
    for (auto t : treated) n_t += t ? 1 : 0;
    if (n_t == 0 || n_t == static_cast<size_t>(n))
        throw DataError("psm_att: both treatment arms must be non-empty");

    Eigen::MatrixXd X(n, covariates.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(covariates.cols()) = covariates;
    Eigen::VectorXd beta = logistic_fit(treated, X);
    Eigen::VectorXd logit = X * beta;

    const double mean_l = logit.mean();
    const double sd_l = std::sqrt((logit.array() - mean_l).square().sum() / double(n - 1));
    const double caliper = caliper_mult * sd_l;

    // treated processed by descending propensity, index as tie-break
    std::vector<Eigen::Index> torder;
    std::set<std::pair<double, Eigen::Index>> controls;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (treated[i]) torder.push_back(i);
        else controls.emplace(logit[i], i);
    }
    std::sort(torder.begin(), torder.end(), [&](Eigen::Index a, Eigen::Index b) {
        return logit[a] != logit[b] ? logit[a] > logit[b] : a < b;
    });

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index t : torder) {
        if (controls.empty()) break;
        auto hi = controls.lower_bound({logit[t], std::numeric_limits<Eigen::Index>::min()});
        const std::pair<double, Eigen::Index>* best = nullptr;
        double best_d = caliper;
        if (hi != controls.end()) {
            double d = std::fabs(hi->first - logit[t]);
            if (d <= best_d) { best = &*hi; best_d = d; }
        }
        if (hi != controls.begin()) {
            auto lo = std::prev(hi);
            double d = std::fabs(lo->first - logit[t]);
            // strict < keeps the higher-side candidate on exact ties,
            // which is deterministic either way
            if (d < best_d || (best == nullptr && d <= best_d)) { best = &*lo; best_d = d; }
        }
        if (!best) continue;
        pairs.emplace_back(t, best->second);
        controls.erase(*best);
    }

    if (pairs.empty()) {
        double tmin = 1e300, tmax = -1e300, cmin = 1e300, cmax = -1e300;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (treated[i]) { tmin = std::min(tmin, logit[i]); tmax = std::max(tmax, logit[i]); }
            else            { cmin = std::min(cmin, logit[i]); cmax = std::max(cmax, logit[i]); }
        }
        throw DataError("psm_att: no matches within caliper " + std::to_string(caliper) +
                        "; treated logit range [" + std::to_string(tmin) + ", " + std::to_string(tmax) +
                        "], control range [" + std::to_string(cmin) + ", " + std::to_string(cmax) + "]");
    }

    MatchResult r;
    r.n_treated = n_t;
    r.n_control = static_cast<size_t>(n) - n_t;
    r.n_matched = pairs.size();
    r.caliper = caliper;
    double sum = 0, sum2 = 0;
    for (auto [t, ctl] : pairs) {
        double d = y[t] - y[ctl];
        sum += d;
        sum2 += d * d;
    }
    const double m = double(pairs.size());
    r.att = sum / m;
    r.se = pairs.size() > 1 ? std::sqrt((sum2 - sum * sum / m) / (m - 1) / m) : 0.0;

    auto smd = [&](Eigen::Index col, const std::vector<Eigen::Index>& ts,
                   const std::vector<Eigen::Index>& cs) {
        auto stats = [&](const std::vector<Eigen::Index>& idx) {
            double mu = 0;
            for (auto i : idx) mu += covariates(i, col);
            mu /= double(idx.size());
            double v = 0;
            for (auto i : idx) v += (covariates(i, col) - mu) * (covariates(i, col) - mu);
            v = idx.size() > 1 ? v / double(idx.size() - 1) : 0.0;
            return std::pair{mu, v};
        };
        auto [mt, vt] = stats(ts);
        auto [mc, vc] = stats(cs);
        double denom = std::sqrt((vt + vc) / 2.0);
        return denom > 0 ? (mt - mc) / denom : 0.0;
    };

    std::vector<Eigen::Index> all_t, all_c, mat_t, mat_c;
    for (Eigen::Index i = 0; i < n; ++i) (treated[i] ? all_t : all_c).push_back(i);
    for (auto [t, ctl] : pairs) {
        mat_t.push_back(t);
        mat_c.push_back(ctl);
    }
    for (Eigen::Index col = 0; col < covariates.cols(); ++col) {
        CovariateBalance b;
        b.name = covariate_names[col];
        b.smd_before = smd(col, all_t, all_c);
        b.smd_after = smd(col, mat_t, mat_c);
        r.balance.push_back(b);
    }
    return r;
}

std::pair<double, double> kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DataError("kruskal_wallis: need at least 2 groups");
    size_t n_total = 0;
    for (const auto& gr : groups) {
        if (gr.empty()) throw DataError("kruskal_wallis: empty group");
        n_total += gr.size();
    }

    struct Obs { double v; size_t group; };
    std::vector<Obs> obs;
    obs.reserve(n_total);
    for (size_t gi = 0; gi < groups.size(); ++gi)
        for (double v : groups[gi]) obs.push_back({v, gi});
    std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.v < b.v; });

    if (obs.front().v == obs.back().v) return {0.0, 1.0}; // every value identical

    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    size_t i = 0;
    while (i < obs.size()) {
        size_t j = i;
        while (j < obs.size() && obs[j].v == obs[i].v) ++j;
        const double t = double(j - i);
        const double avg_rank = (double(i + 1) + double(j)) / 2.0;
        for (size_t k = i; k < j; ++k) rank_sum[obs[k].group] += avg_rank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double N = double(n_total);
    double h = 0.0;
    for (size_t gi = 0; gi < groups.size(); ++gi)
        h += rank_sum[gi] * rank_sum[gi] / double(groups[gi].size());
    h = 12.0 / (N * (N + 1.0)) * h - 3.0 * (N + 1.0);
    const double correction = 1.0 - tie_term / (N * N * N - N);
    if (correction > 0) h /= correction;

    boost::math::chi_squared_distribution<double> chi(double(groups.size() - 1));
    double p = h > 0 ? boost::math::cdf(boost::math::complement(chi, h)) : 1.0;
    return {h, p};
}

} // namespace synergylab
