#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

struct SvrConfig {
  double C = 19.0;        // box constraint on the dual coefficients
  double epsilon = 22.4;  // tube half-width, in label units
  // RBF bandwidth; defaults to 1/n_features when unset ("auto" convention
  // over unit-scaled features).
  std::optional<double> gamma;
  bool shrinking = true;        // solver hint; the plain solver ignores it
  std::size_t cache_hint_mb = 64;  // kernel cache hint, same status
  std::size_t max_iterations = 500000;
  double tolerance = 1e-3;  // KKT violation threshold
};

struct SvrModel {
  std::vector<std::vector<double>> support_vectors;  // rows with nonzero coefficient
  std::vector<double> coefficients;                  // beta_i = alpha_i - alpha_i^*
  double bias = 0.0;
  double gamma = 0.0;
  bool converged = false;
  double final_violation = 0.0;
  std::size_t iterations = 0;
};

// Epsilon-insensitive support vector regression with an RBF kernel, solved
// by sequential minimal optimization on the single-coefficient form
// beta in [-C, C]^n with sum(beta) = 0, picking the maximal violating pair
// each step. Labels are the frame's label column (next-day closes in the
// trading pipeline). Non-convergence within the iteration cap is reported
// through the model flags rather than thrown.
SvrModel svr_train(const LabeledFrame& train, const SvrConfig& config = {});

std::vector<double> svr_predict(const SvrModel& model, const LabeledFrame& test);

// Predicted next close vs the prior actual close, coded per the {0,1}
// direction convention (non-positive implied return -> 0).
SignalSeries svr_predict_signals(const SvrModel& model, const LabeledFrame& test,
                                 std::span<const double> prior_closes);

}  // namespace oilsignal
