#include "synergylab/synergy.hpp"

#include "synergylab/error.hpp"
#include "synergylab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synergylab {

double equilibrium_scale(const GroupSizeDistribution& p) {
    double sum_sq = 0.0;
    for (double pg : p.p) sum_sq += pg * pg;
    return 1.0 / sum_sq;
}

EmpiricalSynergy empirical_synergy(const GroupSizeDistribution& p) {
    EmpiricalSynergy e;
    e.z = equilibrium_scale(p);
    e.sizes = p.sizes;
    e.r_emp.reserve(p.support());
    e.R_emp.reserve(p.support());
    for (size_t i = 0; i < p.support(); ++i) {
        e.r_emp.push_back(e.z * p.p[i]);
        e.R_emp.push_back(double(p.sizes[i]) * e.z * p.p[i]);
    }
    e.source = p;
    return e;
}

namespace {

// log of one model term without the alpha factor
inline double log_reduced_term(double g, double beta, double gamma) {
    return (beta - 1.0) * std::log(g) - gamma * (g - 1.0);
}

// alpha(beta, gamma) over the full support; returns NaN on overflow so
// the optimizer can treat it as an infeasible point
double alpha_raw(double beta, double gamma, const GroupSizeDistribution& p) {
    double denom = 0.0;
    for (size_t i = 0; i < p.support(); ++i) {
        double le = log_reduced_term(double(p.sizes[i]), beta, gamma);
        if (le > 700.0) return std::numeric_limits<double>::quiet_NaN();
        denom += p.p[i] * std::exp(le);
    }
    if (!(denom > 0.0) || !std::isfinite(denom))
        return std::numeric_limits<double>::quiet_NaN();
    return 1.0 / denom;
}

} // namespace

double alpha_of(double beta, double gamma, const GroupSizeDistribution& p) {
    if (beta < 0.0 || gamma < 0.0)
        throw ConfigError("alpha_of: beta and gamma must be non-negative");
    double a = alpha_raw(beta, gamma, p);
    if (std::isnan(a))
        throw NumericError("alpha_of overflow: beta*ln(g_max) too large (beta=" +
                           std::to_string(beta) + ", g_max=" + std::to_string(p.g_max) + ")");
    return a;
}

double model_R(double g, double alpha, double beta, double gamma) {
    return alpha * std::pow(g, beta) * std::exp(-gamma * (g - 1.0));
}

SynergyFit fit_synergy(const EmpiricalSynergy& emp, const FitOptions& opts) {
    const GroupSizeDistribution& p = emp.source;

    SynergyFit fit;
    std::vector<size_t> idx; // indices into emp arrays that enter the residual
    for (size_t i = 0; i < p.support(); ++i) {
        if (p.counts[i] >= opts.min_count) {
            idx.push_back(i);
            fit.included_sizes.push_back(p.sizes[i]);
        } else {
            fit.excluded_sizes.push_back(p.sizes[i]);
        }
    }
    if (idx.size() < 3)
        throw DataError("fit_synergy: insufficient support, " + std::to_string(idx.size()) +
                        " sizes with L_g >= " + std::to_string(opts.min_count));

    const bool reduced = opts.target == FitOptions::Target::ReducedR;
    auto rss_at = [&](double beta, double gamma) -> double {
        double a = alpha_raw(beta, gamma, p);
        if (std::isnan(a)) return std::numeric_limits<double>::infinity();
        double rss = 0.0;
        for (size_t i : idx) {
            double g = double(p.sizes[i]);
            double log_term = log_reduced_term(g, beta, gamma) + (reduced ? 0.0 : std::log(g));
            if (log_term > 700.0) return std::numeric_limits<double>::infinity();
            double r = emp.R_emp[i] - a * std::exp(log_term);
            double w = opts.weight_by_count ? double(p.counts[i]) : 1.0;
            rss += w * r * r;
        }
        return rss;
    };

    // box clipping: evaluate at the projection, penalize the violation so
    // the simplex is pushed back into beta, gamma >= 0
    auto objective = [&](std::span<const double> x) -> double {
        double beta = std::max(x[0], 0.0), gamma = std::max(x[1], 0.0);
        double viol = (beta - x[0]) + (gamma - x[1]);
        return rss_at(beta, gamma) * (1.0 + viol) + viol;
    };

    NelderMeadOptions nm;
    nm.tolerance = opts.tolerance;
    nm.max_iterations = opts.max_iterations;

    bool any_converged = false;
    double best_rss = std::numeric_limits<double>::infinity();
    for (double b0 : opts.beta_starts) {
        for (double g0 : opts.gamma_starts) {
            double x0[2] = {b0, g0};
            double step[2] = {0.25, 0.1};
            auto res = nelder_mead(objective, x0, step, nm);
            FitStartTrace tr;
            tr.beta0 = b0;
            tr.gamma0 = g0;
            tr.beta = std::max(res.x[0], 0.0);
            tr.gamma = std::max(res.x[1], 0.0);
            tr.rss = rss_at(tr.beta, tr.gamma);
            tr.iterations = res.iterations;
            tr.converged = res.converged;
            fit.trace.push_back(tr);
            ++fit.n_starts;
            any_converged |= tr.converged;
            // best final point across all starts; non-converged finals still
            // compete (plateau "convergence" would otherwise shadow a better
            // valley that ran out of iterations)
            if (tr.rss < best_rss) {
                best_rss = tr.rss;
                fit.beta = tr.beta;
                fit.gamma = tr.gamma;
            }
        }
    }
    if (!any_converged) {
        std::string detail;
        for (const auto& tr : fit.trace)
            detail += " (" + std::to_string(tr.beta0) + "," + std::to_string(tr.gamma0) + ")->" +
                      std::to_string(tr.iterations) + "it rss=" + std::to_string(tr.rss);
        throw NumericError("fit_synergy: no start converged;" + detail);
    }

    fit.rss = best_rss;
    fit.alpha = alpha_of(fit.beta, fit.gamma, p);

    double wsum = 0.0, mean = 0.0;
    for (size_t i : idx) {
        double w = opts.weight_by_count ? double(p.counts[i]) : 1.0;
        mean += w * emp.R_emp[i];
        wsum += w;
    }
    mean /= wsum;
    double tss = 0.0;
    for (size_t i : idx) {
        double w = opts.weight_by_count ? double(p.counts[i]) : 1.0;
        double d = emp.R_emp[i] - mean;
        tss += w * d * d;
    }
    fit.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : (fit.rss == 0.0 ? 1.0 : 0.0);
    return fit;
}

GroupSizeOptimum optimal_group_size(const SynergyFit& fit) {
    GroupSizeOptimum o;
    if (fit.gamma == 0.0) {
        o.kind = fit.beta > 0.0 ? OptimumKind::MonotoneIncreasing : OptimumKind::Flat;
        return o;
    }
    if (fit.beta / fit.gamma > 1.0) {
        o.kind = OptimumKind::Interior;
        o.g_star = fit.beta / fit.gamma;
    } else {
        o.kind = OptimumKind::BoundarySolo;
    }
    return o;
}

const char* optimum_kind_name(OptimumKind k) {
    switch (k) {
        case OptimumKind::Interior: return "interior";
        case OptimumKind::BoundarySolo: return "boundary_solo";
        case OptimumKind::MonotoneIncreasing: return "monotone_increasing";
        default: return "flat";
    }
}

double R_at(const SynergyFit& fit, double g) {
    return model_R(g, fit.alpha, fit.beta, fit.gamma);
}

} // namespace synergylab
