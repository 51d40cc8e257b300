#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dbnt {

// Objective callback: fill `grad` (same length as `x`) and return the loss.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct CgOptions {
    std::size_t line_searches = 3;
    double c1 = 1e-4; // sufficient-decrease constant
    double c2 = 0.9;  // curvature constant
    std::size_t max_evals_per_search = 20;
};

struct CgResult {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::size_t evaluations = 0;
    std::size_t line_searches_done = 0;
};

// Polak-Ribiere nonlinear conjugate gradient, one strong-Wolfe bracketing
// line search (quadratic/cubic interpolation) per iteration, steepest-descent
// reset on non-descent directions. The loss at the returned point never
// exceeds the loss at the starting point. Interpolation trials are always
// probed even when the first trial already satisfies the Wolfe conditions,
// which makes each line search exact on quadratics (and CG finitely
// convergent there). Throws divergence_error if the initial loss is not
// finite; non-finite trial points during a search are rejected, not fatal.
CgResult cg_minimize(const Objective& f, std::vector<double>& x, const CgOptions& options);

} // namespace dbnt
