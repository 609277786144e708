#pragma once

#include <functional>
#include <span>
#include <vector>

namespace synergylab {

struct NelderMeadOptions {
    double tolerance = 1e-8; // simplex diameter (inf-norm) below this stops
    int max_iterations = 2000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex with the standard coefficients (reflection 1,
// expansion 2, contraction 0.5, shrink 0.5). Bound handling is the
// caller's: clip inside the objective. Deterministic.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> step,
                             const NelderMeadOptions& opts = NelderMeadOptions{});

} // namespace synergylab
