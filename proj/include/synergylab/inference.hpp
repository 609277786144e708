#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace synergylab {

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd standard_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    Eigen::VectorXd ci_low, ci_high; // 95%
    double r_squared = 0.0;
    double sigma2 = 0.0;
    size_t n_obs = 0;
};

struct OlsOptions {
    bool robust = false; // HC1 standard errors
    double ci_level = 0.95;
};

// Classical least squares with inference. X must include the intercept
// column if one is wanted. Rank-deficient designs throw, naming the
// collinear columns.
OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
              const OlsOptions& opts = OlsOptions{});

struct MediationResult {
    double total_effect = 0;    // c: y ~ g
    double direct_effect = 0;   // c': y ~ g + m, coefficient on g
    double path_a = 0;          // m ~ g
    double path_b = 0;          // y ~ g + m, coefficient on m
    double indirect_effect = 0; // a * b
    double proportion_mediated = 0;
    bool proportion_defined = false;
    bool suppression = false;
    double boot_ci_low = 0, boot_ci_high = 0; // percentile CI on a*b
    double p_total = 1, p_direct = 1, p_a = 1, p_b = 1, p_indirect = 1;
    size_t n_obs = 0;
    int n_boot = 0;
};

// Single-mediator path analysis with a seeded percentile bootstrap on the
// indirect effect. c = c' + a*b holds to numerical precision by OLS
// algebra. Throws when the mediator is collinear with the treatment.
MediationResult mediate(const Eigen::VectorXd& g, const Eigen::VectorXd& m,
                        const Eigen::VectorXd& y, int n_boot = 1000, uint64_t seed = 1);

// DI = b0 + b1 g + b2 R + b3 W + b4 (R*W); returns the full regression,
// interaction coefficient at index 4. Constant W throws.
OlsResult moderate(const Eigen::VectorXd& y, const Eigen::VectorXd& g,
                   const Eigen::VectorXd& r, const Eigen::VectorXd& w,
                   const OlsOptions& opts = OlsOptions{});

struct CovariateBalance {
    std::string name;
    double smd_before = 0, smd_after = 0;
};

struct MatchResult {
    double att = 0, se = 0;
    size_t n_treated = 0, n_control = 0, n_matched = 0;
    double caliper = 0; // absolute width on the logit propensity scale
    std::vector<CovariateBalance> balance;
};

// 1:1 nearest-neighbor propensity matching without replacement on the
// logit scale, caliper = caliper_mult * SD(logit). Treated units are
// matched in descending propensity order with index tie-breaks, so the
// result is deterministic.
MatchResult psm_att(const Eigen::VectorXd& y, const std::vector<uint8_t>& treated,
                    const Eigen::MatrixXd& covariates,
                    const std::vector<std::string>& covariate_names,
                    double caliper_mult = 0.2);

// Rank-based H with tie correction; p from the chi-square approximation
// with k-1 degrees of freedom.
std::pair<double, double> kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Fitted propensity scores (logistic regression via IRLS); exposed for
// diagnostics and tests.
Eigen::VectorXd logistic_fit(const std::vector<uint8_t>& label, const Eigen::MatrixXd& X,
                             int max_iter = 100, double tol = 1e-10);

} // namespace synergylab
