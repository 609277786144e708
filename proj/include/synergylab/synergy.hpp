#pragma once

#include "synergylab/collab_hypergraph.hpp"

#include <cstdint>
#include <vector>

namespace synergylab {

// Empirical synergy curve derived from the group-size distribution under
// the public-goods-game equilibrium: r(g) = z p_g with z forced by
// sum_g p_g (1 - z p_g) = 0, and R(g) = g r(g).
struct EmpiricalSynergy {
    double z = 0.0;
    std::vector<uint32_t> sizes; // support, ascending
    std::vector<double> r_emp;   // z p_g
    std::vector<double> R_emp;   // g z p_g
    GroupSizeDistribution source;
};

double equilibrium_scale(const GroupSizeDistribution& p); // z = 1 / sum p_g^2

EmpiricalSynergy empirical_synergy(const GroupSizeDistribution& p);

// Scaling constant forced by the equilibrium condition:
// alpha(beta, gamma) = 1 / sum_g p_g g^(beta-1) e^(-gamma (g-1)),
// summed over the full support of p. Throws NumericError on overflow.
double alpha_of(double beta, double gamma, const GroupSizeDistribution& p);

// R(g; alpha, beta, gamma) = alpha g^beta e^(-gamma (g-1))
double model_R(double g, double alpha, double beta, double gamma);

struct FitStartTrace {
    double beta0 = 0, gamma0 = 0; // starting point
    double beta = 0, gamma = 0;   // converged point
    double rss = 0;
    int iterations = 0;
    bool converged = false;
};

struct SynergyFit {
    double alpha = 0, beta = 0, gamma = 0;
    double rss = 0, r_squared = 0;
    std::vector<uint32_t> included_sizes; // L_g >= min_count
    std::vector<uint32_t> excluded_sizes;
    int n_starts = 0;
    std::vector<FitStartTrace> trace;
};

struct FitOptions {
    uint64_t min_count = 100;
    std::vector<double> beta_starts{0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> gamma_starts{0.01, 0.05, 0.1, 0.25, 0.5};
    double tolerance = 1e-8;
    int max_iterations = 2000;
    // Eq-5 target fits R_emp against alpha g^beta e^(-gamma(g-1)); the
    // reduced form drops one power of g (kept for comparison runs).
    enum class Target : uint8_t { ModelR, ReducedR } target = Target::ModelR;
    bool weight_by_count = false;
};

// Least-squares fit of (beta, gamma) >= 0 with alpha re-derived from the
// equilibrium constraint at every objective evaluation; multi-start
// Nelder-Mead, best residual wins, deterministic.
SynergyFit fit_synergy(const EmpiricalSynergy& emp, const FitOptions& opts = FitOptions{});

enum class OptimumKind : uint8_t {
    Interior,           // beta/gamma > 1: argmax at g* = beta/gamma
    BoundarySolo,       // beta/gamma <= 1: R is maximal at g = 1
    MonotoneIncreasing, // gamma = 0, beta > 0
    Flat,               // gamma = 0, beta = 0
};

struct GroupSizeOptimum {
    OptimumKind kind = OptimumKind::Flat;
    double g_star = 0.0; // meaningful for Interior only
};

GroupSizeOptimum optimal_group_size(const SynergyFit& fit);
const char* optimum_kind_name(OptimumKind k);

// Model value at any g (including sizes excluded from the fit); this is
// the per-paper mediator consumed by the inference layer.
double R_at(const SynergyFit& fit, double g);

} // namespace synergylab
