#pragma once

#include <functional>
#include <vector>

namespace oilsignal {

struct NelderMeadOptions {
  int max_iterations = 4000;
  double x_tolerance = 1e-9;   // simplex diameter
  double f_tolerance = 1e-12;  // best-to-worst value spread, relative to 1+|best|
  double initial_step = 0.25;  // per-coordinate displacement of the start simplex
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  // Best objective value after each iteration; non-increasing by construction.
  std::vector<double> best_trace;
};

// Derivative-free simplex minimization (reflection/expansion/contraction/
// shrink with the classic coefficients). Deterministic for a fixed start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace oilsignal
