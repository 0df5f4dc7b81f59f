#include "oilsignal/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oilsignal {

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return std::exp(-gamma * ss);
}

}  // namespace

SvrModel svr_train(const LabeledFrame& train, const SvrConfig& config) {
  const std::size_t n = train.rows();
  if (n < 2) throw std::invalid_argument("svr_train: need at least 2 rows");
  if (!(config.C > 0.0)) throw std::invalid_argument("svr_train: C must be positive");
  if (config.epsilon < 0.0) throw std::invalid_argument("svr_train: epsilon must be >= 0");
  for (double y : train.labels) {
    if (!std::isfinite(y)) throw std::invalid_argument("svr_train: non-finite label");
  }

  const double gamma =
      config.gamma.value_or(train.cols() > 0 ? 1.0 / static_cast<double>(train.cols()) : 1.0);

  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = train.row(i);

  // Full kernel matrix; problem sizes here stay in the low thousands.
  std::vector<std::vector<double>> k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = rbf(rows[i], rows[j], gamma);
      k[i][j] = v;
      k[j][i] = v;
    }
  }

  const double C = config.C;
  const double eps = config.epsilon;
  std::vector<double> beta(n, 0.0);
  std::vector<double> f(n, 0.0);  // f_i = sum_j beta_j K_ij (no bias)

  // KKT screening values. Increasing beta_i improves the dual by
  // up_i = y_i - f_i - eps (beta_i >= 0) or y_i - f_i + eps (beta_i < 0);
  // decreasing beta_j improves it by -(low_j) with
  // low_j = y_j - f_j - eps (beta_j > 0) or y_j - f_j + eps (beta_j <= 0).
  // Optimal iff max(up) - min(low) <= tolerance, with the bias in between.
  auto up_value = [&](std::size_t i) {
    return train.labels[i] - f[i] + (beta[i] < 0.0 ? eps : -eps);
  };
  auto low_value = [&](std::size_t i) {
    return train.labels[i] - f[i] + (beta[i] > 0.0 ? -eps : eps);
  };

  SvrModel model;
  model.gamma = gamma;

  double violation = 0.0;
  std::size_t it = 0;
  for (; it < config.max_iterations; ++it) {
    double best_up = -std::numeric_limits<double>::infinity();
    double best_low = std::numeric_limits<double>::infinity();
    std::size_t i_up = n, i_low = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (beta[i] < C) {
        const double u = up_value(i);
        if (u > best_up) {
          best_up = u;
          i_up = i;
        }
      }
      if (beta[i] > -C) {
        const double l = low_value(i);
        if (l < best_low) {
          best_low = l;
          i_low = i;
        }
      }
    }
    violation = best_up - best_low;
    if (i_up == n || i_low == n || violation < config.tolerance) break;

    const std::size_t i = i_up;
    const std::size_t j = i_low;
    // Step t moves beta_i up and beta_j down, keeping sum(beta) = 0.
    double t_max = std::min(C - beta[i], beta[j] + C);
    // Do not step across the |beta| kinks at zero; the gradient changes there.
    if (beta[i] < 0.0) t_max = std::min(t_max, -beta[i]);
    if (beta[j] > 0.0) t_max = std::min(t_max, beta[j]);
    const double eta = k[i][i] + k[j][j] - 2.0 * k[i][j];
    double t = eta > 1e-12 ? violation / eta : t_max;
    t = std::min(t, t_max);
    if (!(t > 0.0)) {
      // Numerically stuck pair; treat as converged at this violation level.
      break;
    }
    beta[i] += t;
    beta[j] -= t;
    for (std::size_t r = 0; r < n; ++r) f[r] += t * (k[i][r] - k[j][r]);
  }

  model.iterations = it;
  model.final_violation = violation;
  model.converged = violation < config.tolerance;

  // Bias sits midway between the active bounds.
  double best_up = -std::numeric_limits<double>::infinity();
  double best_low = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] < C) best_up = std::max(best_up, up_value(i));
    if (beta[i] > -C) best_low = std::min(best_low, low_value(i));
  }
  if (std::isfinite(best_up) && std::isfinite(best_low)) {
    model.bias = 0.5 * (best_up + best_low);
  } else if (std::isfinite(best_up)) {
    model.bias = best_up;
  } else if (std::isfinite(best_low)) {
    model.bias = best_low;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] != 0.0) {
      model.support_vectors.push_back(rows[i]);
      model.coefficients.push_back(beta[i]);
    }
  }
  return model;
}

std::vector<double> svr_predict(const SvrModel& model, const LabeledFrame& test) {
  std::vector<double> out;
  out.reserve(test.rows());
  std::vector<double> row(test.cols());
  for (std::size_t r = 0; r < test.rows(); ++r) {
    for (std::size_t c = 0; c < test.cols(); ++c) row[c] = test.features[c][r];
    double value = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
      value += model.coefficients[s] * rbf(row, model.support_vectors[s], model.gamma);
    }
    out.push_back(value);
  }
  return out;
}

SignalSeries svr_predict_signals(const SvrModel& model, const LabeledFrame& test,
                                 std::span<const double> prior_closes) {
  if (prior_closes.size() != test.rows()) {
    throw std::invalid_argument("svr_predict_signals: prior close count mismatch");
  }
  const std::vector<double> predicted = svr_predict(model, test);
  SignalSeries out;
  out.alphabet = SignalAlphabet::zero_one;
  out.dates = test.dates;
  out.values.reserve(test.rows());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!(prior_closes[i] > 0.0)) {
      throw std::invalid_argument("svr_predict_signals: non-positive prior close");
    }
    const double implied = std::log(predicted[i] / prior_closes[i]);
    out.values.push_back(std::isfinite(implied) && implied > 0.0 ? 1 : 0);
  }
  return out;
}

}  // namespace oilsignal
