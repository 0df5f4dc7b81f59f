#include "oilsignal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "oilsignal/distributions.hpp"

namespace oilsignal {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Central moments m2, m3, m4 about the mean (biased, divide by n).
struct Moments {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(std::span<const double> v, double mean) {
  Moments m;
  for (double x : v) {
    const double d = x - mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const double n = static_cast<double>(v.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

}  // namespace

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  if (lo == hi) return sorted[lo];
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

DescriptiveSummary describe(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("describe: need at least 2 values");
  DescriptiveSummary s;
  s.count = values.size();
  s.mean = mean_of(values);
  const Moments m = central_moments(values, s.mean);
  const double n = static_cast<double>(values.size());
  s.std_dev = std::sqrt(m.m2 * n / (n - 1.0));
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.q5 = quantile(values, 0.05);
  s.q25 = quantile(values, 0.25);
  s.median = quantile(values, 0.50);
  s.q75 = quantile(values, 0.75);
  s.q95 = quantile(values, 0.95);
  if (m.m2 > 0.0) {
    s.skewness = m.m3 / std::pow(m.m2, 1.5);
    s.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
  }
  return s;
}

JarqueBeraResult jarque_bera(std::span<const double> values) {
  if (values.size() < 8) throw std::invalid_argument("jarque_bera: need at least 8 values");
  const DescriptiveSummary s = describe(values);
  const double n = static_cast<double>(values.size());
  JarqueBeraResult r;
  r.statistic = n / 6.0 *
                (s.skewness * s.skewness + 0.25 * s.excess_kurtosis * s.excess_kurtosis);
  r.normality_rejected = r.statistic > 5.991;
  return r;
}

std::vector<CorrelogramPoint> acf(std::span<const double> values, std::size_t max_lag) {
  if (max_lag >= values.size()) throw std::invalid_argument("acf: max_lag must be < count");
  const double mean = mean_of(values);
  double denom = 0.0;
  for (double x : values) denom += (x - mean) * (x - mean);
  if (denom == 0.0) throw std::invalid_argument("acf: constant series");
  const double band = 1.96 / std::sqrt(static_cast<double>(values.size()));
  std::vector<CorrelogramPoint> out;
  out.reserve(max_lag);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < values.size(); ++t) {
      num += (values[t] - mean) * (values[t + k] - mean);
    }
    out.push_back({k, num / denom, band});
  }
  return out;
}

std::vector<CorrelogramPoint> pacf(std::span<const double> values, std::size_t max_lag) {
  const std::vector<CorrelogramPoint> rho_points = acf(values, max_lag);
  std::vector<double> rho(max_lag + 1, 1.0);
  for (std::size_t k = 1; k <= max_lag; ++k) rho[k] = rho_points[k - 1].value;

  // Durbin-Levinson: phi[k][k] is the partial autocorrelation at lag k.
  std::vector<double> phi_prev(max_lag + 1, 0.0), phi(max_lag + 1, 0.0);
  std::vector<CorrelogramPoint> out;
  out.reserve(max_lag);
  const double band = rho_points.empty() ? 0.0 : rho_points[0].confidence_band;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    if (k == 1) {
      phi[1] = rho[1];
    } else {
      double num = rho[k];
      double den = 1.0;
      for (std::size_t j = 1; j < k; ++j) {
        num -= phi_prev[j] * rho[k - j];
        den -= phi_prev[j] * rho[j];
      }
      phi[k] = den != 0.0 ? num / den : 0.0;
      for (std::size_t j = 1; j < k; ++j) phi[j] = phi_prev[j] - phi[k] * phi_prev[k - j];
    }
    out.push_back({k, phi[k], band});
    phi_prev = phi;
  }
  return out;
}

std::vector<LjungBoxPoint> ljung_box(std::span<const double> residuals,
                                     std::span<const std::size_t> lags) {
  if (lags.empty()) return {};
  const std::size_t max_lag = *std::max_element(lags.begin(), lags.end());
  const std::vector<CorrelogramPoint> rho = acf(residuals, max_lag);
  const double n = static_cast<double>(residuals.size());
  std::vector<LjungBoxPoint> out;
  out.reserve(lags.size());
  for (std::size_t h : lags) {
    double q = 0.0;
    for (std::size_t k = 1; k <= h; ++k) {
      q += rho[k - 1].value * rho[k - 1].value / (n - static_cast<double>(k));
    }
    q *= n * (n + 2.0);
    out.push_back({h, q, chi_squared_sf(q, static_cast<double>(h))});
  }
  return out;
}

std::size_t adf_default_lag(std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

AdfResult adf_test(std::span<const double> values, std::size_t lag_order) {
  const std::size_t n = values.size();
  if (n <= lag_order + 2) throw std::invalid_argument("adf_test: series too short for lag order");
  std::vector<double> diff(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = values[i + 1] - values[i];

  // Rows t = lag_order ... n-2 of the differenced series.
  const std::size_t rows = (n - 1) - lag_order;
  const std::size_t cols = 2 + lag_order;  // constant, y_{t-1}, lagged diffs
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + lag_order;  // index into diff
    y(static_cast<Eigen::Index>(r)) = diff[t];
    x(static_cast<Eigen::Index>(r), 0) = 1.0;
    x(static_cast<Eigen::Index>(r), 1) = values[t];  // level one step before diff[t]
    for (std::size_t j = 1; j <= lag_order; ++j) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(1 + j)) = diff[t - j];
    }
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (!lu.isInvertible()) throw std::runtime_error("adf_test: singular regression");
  const Eigen::VectorXd beta = lu.solve(x.transpose() * y);
  const Eigen::VectorXd resid = y - x * beta;
  const double dof = static_cast<double>(rows) - static_cast<double>(cols);
  if (dof <= 0.0) throw std::runtime_error("adf_test: not enough observations");
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::MatrixXd cov = lu.inverse() * sigma2;
  const double se = std::sqrt(cov(1, 1));
  AdfResult out;
  out.statistic = beta(1) / se;
  out.lag_order = lag_order;
  out.unit_root_rejected = out.statistic < -2.86;
  return out;
}

std::vector<QqPoint> qq_points(std::span<const double> values, QqReference reference, double df) {
  if (values.size() < 10) throw std::invalid_argument("qq_points: need at least 10 values");
  if (reference == QqReference::student_t && df <= 0.0) {
    throw std::invalid_argument("qq_points: df must be positive");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<QqPoint> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    const double q = reference == QqReference::normal ? normal_quantile(p)
                                                      : student_t_quantile(p, df);
    out.push_back({q, sorted[i]});
  }
  return out;
}

}  // namespace oilsignal
