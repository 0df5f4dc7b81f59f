#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace oilsignal {

struct DescriptiveSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample, n-1
  double min = 0.0;
  double q5 = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  double max = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;  // normal -> 0
};

struct CorrelogramPoint {
  std::size_t lag = 0;
  double value = 0.0;
  double confidence_band = 0.0;  // +-1.96/sqrt(n)
};

struct LjungBoxPoint {
  std::size_t lag = 0;
  double statistic = 0.0;
  double p_value = 0.0;
};

struct JarqueBeraResult {
  double statistic = 0.0;
  bool normality_rejected = false;  // at 5%: statistic > 5.991
};

struct AdfResult {
  double statistic = 0.0;          // t-ratio of the lagged-level coefficient
  std::size_t lag_order = 0;
  bool unit_root_rejected = false;  // at 5%: statistic < -2.86 (constant-only)
};

// Quantile by linear interpolation between order statistics (index h = (n-1)p).
double quantile(std::span<const double> values, double p);

DescriptiveSummary describe(std::span<const double> values);

JarqueBeraResult jarque_bera(std::span<const double> values);

// Sample autocorrelations rho(1..max_lag); denominator is the lag-0 sum.
std::vector<CorrelogramPoint> acf(std::span<const double> values, std::size_t max_lag);

// Partial autocorrelations via Durbin-Levinson on the sample ACF.
std::vector<CorrelogramPoint> pacf(std::span<const double> values, std::size_t max_lag);

std::vector<LjungBoxPoint> ljung_box(std::span<const double> residuals,
                                     std::span<const std::size_t> lags);

// Rule-of-thumb lag: floor(12 * (n/100)^(1/4)).
std::size_t adf_default_lag(std::size_t n);

// Augmented Dickey-Fuller regression with constant: delta y_t on
// {1, y_{t-1}, delta y_{t-1} ... delta y_{t-lag}}.
AdfResult adf_test(std::span<const double> values, std::size_t lag_order);

enum class QqReference { normal, student_t };

struct QqPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

// Order statistics paired with reference quantiles at positions (i-0.5)/n.
// df is used only for the student_t reference.
std::vector<QqPoint> qq_points(std::span<const double> values, QqReference reference,
                               double df = 5.0);

}  // namespace oilsignal
