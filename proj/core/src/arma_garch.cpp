#include "oilsignal/arma_garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "oilsignal/distributions.hpp"
#include "oilsignal/optim.hpp"

namespace oilsignal {

double GarchParams::persistence() const {
  double s = 0.0;
  for (double a : alpha) s += a;
  for (double b : beta) s += b;
  return s;
}

namespace {

// Levinson-Durbin map from partial autocorrelations in (-1,1) to the
// coefficients of a stationary AR polynomial (Monahan's transform). The
// inverse direction is not needed; optimizers work in the unconstrained
// z-space with r = tanh(z).
std::vector<double> pacf_to_ar(std::span<const double> partial) {
  std::vector<double> a(partial.begin(), partial.end());
  std::vector<double> prev(a.size(), 0.0);
  for (std::size_t k = 1; k < a.size() + 1; ++k) {
    const double r = partial[k - 1];
    for (std::size_t j = 0; j + 1 < k; ++j) {
      a[j] = prev[j] - r * prev[k - 2 - j];
    }
    a[k - 1] = r;
    std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), prev.begin());
  }
  return a;
}

ArmaParams decode_arma(std::span<const double> theta, std::size_t p, std::size_t q) {
  ArmaParams params;
  params.mu = theta[0];
  std::vector<double> r(std::max(p, q));
  for (std::size_t i = 0; i < p; ++i) r[i] = std::tanh(theta[1 + i]);
  params.ar = pacf_to_ar(std::span(r.data(), p));
  for (std::size_t j = 0; j < q; ++j) r[j] = std::tanh(theta[1 + p + j]);
  // The moving-average polynomial 1 + sum(b_j L^j) is invertible exactly when
  // 1 - sum(-b_j L^j) is a stationary AR polynomial.
  std::vector<double> ma_neg = pacf_to_ar(std::span(r.data(), q));
  params.ma.resize(q);
  for (std::size_t j = 0; j < q; ++j) params.ma[j] = -ma_neg[j];
  return params;
}

// Conditional residuals with pre-sample values at the sample mean and
// pre-sample residuals at zero.
void arma_residuals(const ArmaParams& params, std::span<const double> y, double presample_mean,
                    std::vector<double>& eps) {
  const std::size_t n = y.size();
  const std::size_t p = params.ar.size();
  const std::size_t q = params.ma.size();
  eps.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double fitted = params.mu;
    for (std::size_t i = 1; i <= p; ++i) {
      const double y_lag = t >= i ? y[t - i] : presample_mean;
      fitted += params.ar[i - 1] * y_lag;
    }
    for (std::size_t j = 1; j <= q; ++j) {
      const double e_lag = t >= j ? eps[t - j] : 0.0;
      fitted += params.ma[j - 1] * e_lag;
    }
    eps[t] = y[t] - fitted;
  }
}

bool roots_outside_unit_circle(std::span<const double> coeffs) {
  // Characteristic polynomial 1 - c_1 z - ... - c_k z^k; stationary iff all
  // roots lie outside the unit circle, equivalently the companion matrix of
  // z^k - c_1 z^{k-1} - ... - c_k has spectral radius < 1.
  std::size_t k = coeffs.size();
  while (k > 0 && coeffs[k - 1] == 0.0) --k;
  if (k == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                    static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) companion(0, static_cast<Eigen::Index>(i)) = coeffs[i];
  for (std::size_t i = 1; i < k; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  const Eigen::VectorXcd eig = companion.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i)) >= 1.0 - 1e-10) return false;
  }
  return true;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GarchCoding {
  std::size_t n_arch;
  std::size_t m_garch;
  Innovation innovation;

  std::size_t dim() const {
    const std::size_t k = n_arch + m_garch;
    return 2 + (k > 0 ? k - 1 : 0) + (innovation == Innovation::student_t ? 1 : 0);
  }

  // theta = (ln omega, logit persistence, share logits..., df logit).
  GarchParams decode(std::span<const double> theta) const {
    GarchParams params;
    params.innovation = innovation;
    params.omega = std::exp(theta[0]);
    const double s = logistic(theta[1]);
    const std::size_t k = n_arch + m_garch;
    std::vector<double> shares(k, 1.0);
    if (k > 1) {
      double total = 1.0;  // the final logit is fixed at zero
      for (std::size_t i = 0; i + 1 < k; ++i) {
        shares[i] = std::exp(theta[2 + i]);
        total += shares[i];
      }
      shares[k - 1] = 1.0;
      for (double& w : shares) w /= total;
    }
    params.alpha.resize(n_arch);
    params.beta.resize(m_garch);
    for (std::size_t i = 0; i < n_arch; ++i) params.alpha[i] = s * shares[i];
    for (std::size_t j = 0; j < m_garch; ++j) params.beta[j] = s * shares[n_arch + j];
    params.df = innovation == Innovation::student_t
                    ? 2.05 + 97.95 * logistic(theta[dim() - 1])
                    : 0.0;
    return params;
  }
};

double garch_log_likelihood(const GarchParams& params, std::span<const double> eps,
                            std::vector<double>& sigma2_buffer) {
  sigma2_buffer = conditional_variance(params, eps);
  double ll = 0.0;
  for (std::size_t t = 0; t < eps.size(); ++t) {
    ll += params.innovation == Innovation::student_t
              ? std_t_log_density(eps[t], sigma2_buffer[t], params.df)
              : normal_log_density(eps[t], sigma2_buffer[t]);
  }
  return ll;
}

}  // namespace

bool is_stationary(std::span<const double> ar) { return roots_outside_unit_circle(ar); }

bool is_invertible(std::span<const double> ma) {
  std::vector<double> negated(ma.begin(), ma.end());
  for (double& b : negated) b = -b;
  return roots_outside_unit_circle(negated);
}

ArmaFit fit_arma(std::span<const double> returns, std::size_t p, std::size_t q) {
  const std::size_t n = returns.size();
  if (n < 50 * std::max({p, q, std::size_t{1}})) {
    throw std::invalid_argument("fit_arma: series too short for requested order");
  }

  double mean = 0.0;
  for (double y : returns) mean += y;
  mean /= static_cast<double>(n);

  std::vector<double> eps;
  const auto objective = [&](const std::vector<double>& theta) {
    const ArmaParams params = decode_arma(theta, p, q);
    arma_residuals(params, returns, mean, eps);
    double rss = 0.0;
    for (double e : eps) rss += e * e;
    return rss;
  };

  const std::size_t dim = 1 + p + q;
  NelderMeadOptions options;
  options.max_iterations = 4000 * static_cast<int>(dim);
  options.initial_step = 0.4;

  // A few deterministic starts guard against ridge-shaped CSS surfaces
  // (near-cancelling AR/MA pairs).
  std::vector<std::vector<double>> starts;
  for (double z : {0.0, 0.42, -0.42}) {
    std::vector<double> start(dim, z);
    start[0] = mean;
    starts.push_back(std::move(start));
    if (dim == 1) break;
  }

  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    const NelderMeadResult r = nelder_mead(objective, start, options);
    if (r.value < best.value) best = r;
  }
  for (int attempt = 0; attempt < 2 && !best.converged; ++attempt) {
    best = nelder_mead(objective, best.x, options);
  }
  if (!best.converged) {
    throw std::runtime_error("fit_arma: optimizer did not converge (final value " +
                             std::to_string(best.value) + ")");
  }

  ArmaFit fit;
  fit.params = decode_arma(best.x, p, q);
  arma_residuals(fit.params, returns, mean, eps);
  fit.residuals = eps;
  fit.n = n;
  fit.converged = best.converged;
  fit.final_spread = best.value;
  const double rss = best.value;
  const double nd = static_cast<double>(n);
  fit.log_likelihood = -0.5 * nd * (std::log(2.0 * std::numbers::pi * rss / nd) + 1.0);
  const double k = static_cast<double>(p + q + 1);
  fit.bic = k * std::log(nd) - 2.0 * fit.log_likelihood;
  if (!is_stationary(fit.params.ar) || !is_invertible(fit.params.ma)) {
    throw std::runtime_error("fit_arma: non-stationary or non-invertible solution");
  }
  return fit;
}

GarchEstimate fit_garch(std::span<const double> residuals, std::size_t n_arch,
                        std::size_t m_garch, Innovation innovation) {
  const std::size_t n = residuals.size();
  if (n < 250) throw std::invalid_argument("fit_garch: need at least 250 residuals");
  if (n_arch < 1) throw std::invalid_argument("fit_garch: need at least one ARCH term");

  double var = 0.0;
  for (double e : residuals) var += e * e;
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw std::invalid_argument("fit_garch: zero-variance residuals");

  const GarchCoding coding{n_arch, m_garch, innovation};
  std::vector<double> sigma2;
  const auto objective = [&](const std::vector<double>& theta) {
    return -garch_log_likelihood(coding.decode(theta), residuals, sigma2);
  };

  // Start at alpha = 0.05, beta split over the remaining 0.85 persistence.
  std::vector<double> start(coding.dim(), 0.0);
  const double s0 = m_garch > 0 ? 0.9 : 0.3;
  start[0] = std::log(var * (1.0 - s0));
  start[1] = std::log(s0 / (1.0 - s0));
  const std::size_t k = n_arch + m_garch;
  if (k > 1) {
    // Final share (a beta term when present) is the softmax reference.
    const double last = m_garch > 0 ? 0.85 / s0 / static_cast<double>(m_garch)
                                    : 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const double share = i < n_arch ? 0.05 / s0 / static_cast<double>(n_arch)
                                      : 0.85 / s0 / static_cast<double>(m_garch);
      start[2 + i] = std::log(share / last);
    }
  }
  if (innovation == Innovation::student_t) {
    const double target = (8.0 - 2.05) / 97.95;
    start[coding.dim() - 1] = std::log(target / (1.0 - target));
  }

  NelderMeadOptions options;
  options.max_iterations = 4000 * static_cast<int>(coding.dim());
  options.initial_step = 0.5;
  NelderMeadResult result = nelder_mead(objective, start, options);
  // Re-inflate the simplex around the best point when the cap was hit; the
  // restart point is inside the new simplex, so the value cannot regress.
  for (int attempt = 0; attempt < 2 && !result.converged; ++attempt) {
    result = nelder_mead(objective, result.x, options);
  }
  if (!result.converged) {
    throw std::runtime_error("fit_garch: optimizer did not converge (final value " +
                             std::to_string(result.value) + ")");
  }

  GarchEstimate estimate;
  estimate.params = coding.decode(result.x);
  estimate.log_likelihood = -result.value;
  estimate.converged = result.converged;
  estimate.final_spread = result.value;
  estimate.boundary = estimate.params.persistence() >= 0.999;
  return estimate;
}

std::vector<double> conditional_variance(const GarchParams& params,
                                         std::span<const double> residuals) {
  if (!(params.omega > 0.0)) throw std::invalid_argument("conditional_variance: omega must be > 0");
  for (double a : params.alpha) {
    if (a < 0.0) throw std::invalid_argument("conditional_variance: negative alpha");
  }
  for (double b : params.beta) {
    if (b < 0.0) throw std::invalid_argument("conditional_variance: negative beta");
  }
  const std::size_t n = residuals.size();
  double seed = 0.0;
  for (double e : residuals) seed += e * e;
  seed = n > 0 ? seed / static_cast<double>(n) : params.omega;
  if (seed <= 0.0) seed = params.omega;

  std::vector<double> sigma2(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = params.omega;
    for (std::size_t i = 1; i <= params.alpha.size(); ++i) {
      const double e2 = t >= i ? residuals[t - i] * residuals[t - i] : seed;
      v += params.alpha[i - 1] * e2;
    }
    for (std::size_t j = 1; j <= params.beta.size(); ++j) {
      const double s2 = t >= j ? sigma2[t - j] : seed;
      v += params.beta[j - 1] * s2;
    }
    sigma2[t] = v;
  }
  return sigma2;
}

OrderSelection select_order(std::span<const double> returns, std::size_t p_max,
                            std::size_t q_max) {
  if (p_max > 3 || q_max > 3) throw std::invalid_argument("select_order: orders above 3 unsupported");
  OrderSelection selection;
  double best_bic = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  for (std::size_t p = 0; p <= p_max; ++p) {
    for (std::size_t q = 0; q <= q_max; ++q) {
      OrderCandidate candidate;
      candidate.p = p;
      candidate.q = q;
      try {
        const ArmaFit fit = fit_arma(returns, p, q);
        candidate.bic = fit.bic;
        candidate.log_likelihood = fit.log_likelihood;
        candidate.ok = true;
        if (fit.bic < best_bic) {
          best_bic = fit.bic;
          selection.p = p;
          selection.q = q;
        }
        any_ok = true;
      } catch (const std::exception& e) {
        candidate.ok = false;
        candidate.error = e.what();
      }
      selection.table.push_back(std::move(candidate));
    }
  }
  if (!any_ok) throw std::runtime_error("select_order: every candidate fit failed");
  return selection;
}

GarchFit fit_arma_garch(std::span<const double> returns, std::size_t p, std::size_t q,
                        std::size_t n_arch, std::size_t m_garch, Innovation innovation) {
  const ArmaFit arma = fit_arma(returns, p, q);
  const GarchEstimate garch = fit_garch(arma.residuals, n_arch, m_garch, innovation);

  GarchFit fit;
  fit.arma = arma.params;
  fit.garch = garch.params;
  fit.log_likelihood = garch.log_likelihood;
  fit.garch_boundary = garch.boundary;
  fit.residuals = arma.residuals;
  fit.conditional_variance_series = conditional_variance(garch.params, arma.residuals);
  fit.standardized_residuals.resize(fit.residuals.size());
  for (std::size_t t = 0; t < fit.residuals.size(); ++t) {
    fit.standardized_residuals[t] =
        fit.residuals[t] / std::sqrt(fit.conditional_variance_series[t]);
  }
  const double k = static_cast<double>(p + q + 1 + 1 + n_arch + m_garch +
                                       (innovation == Innovation::student_t ? 1 : 0));
  fit.bic = k * std::log(static_cast<double>(arma.n)) - 2.0 * fit.log_likelihood;
  fit.train_tail_returns.assign(returns.end() - static_cast<std::ptrdiff_t>(std::min(p, returns.size())),
                                returns.end());
  return fit;
}

SignalSeries forecast_signal(const GarchFit& fit, const ReturnSeries& test_returns) {
  const std::size_t p = fit.arma.ar.size();
  const std::size_t q = fit.arma.ma.size();

  // Rolling buffers, most recent first.
  std::vector<double> y_hist(fit.train_tail_returns.rbegin(), fit.train_tail_returns.rend());
  y_hist.resize(p, 0.0);
  std::vector<double> e_hist(q, 0.0);
  for (std::size_t j = 0; j < q && j < fit.residuals.size(); ++j) {
    e_hist[j] = fit.residuals[fit.residuals.size() - 1 - j];
  }

  SignalSeries out;
  out.alphabet = SignalAlphabet::directional;
  out.dates = test_returns.dates;
  out.values.reserve(test_returns.size());
  for (std::size_t t = 0; t < test_returns.size(); ++t) {
    double forecast = fit.arma.mu;
    for (std::size_t i = 0; i < p; ++i) forecast += fit.arma.ar[i] * y_hist[i];
    for (std::size_t j = 0; j < q; ++j) forecast += fit.arma.ma[j] * e_hist[j];
    out.values.push_back(forecast > 0.0 ? 1 : -1);

    const double realized = test_returns.values[t];
    if (p > 0) {
      for (std::size_t i = p - 1; i > 0; --i) y_hist[i] = y_hist[i - 1];
      y_hist[0] = realized;
    }
    if (q > 0) {
      for (std::size_t j = q - 1; j > 0; --j) e_hist[j] = e_hist[j - 1];
      e_hist[0] = realized - forecast;
    }
  }
  return out;
}

ArmaGarchSim simulate_arma_garch(const ArmaParams& arma, const GarchParams& garch,
                                 std::size_t n, Rng& rng, std::size_t burn_in) {
  const std::size_t p = arma.ar.size();
  const std::size_t q = arma.ma.size();
  const std::size_t total = n + burn_in;

  const double persistence = garch.persistence();
  const double uncond =
      persistence < 1.0 ? garch.omega / (1.0 - persistence) : garch.omega * 100.0;

  std::vector<double> y(total, 0.0), sigma2(total, uncond), eps(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    double v = garch.omega;
    for (std::size_t i = 1; i <= garch.alpha.size(); ++i) {
      const double e2 = t >= i ? eps[t - i] * eps[t - i] : uncond;
      v += garch.alpha[i - 1] * e2;
    }
    for (std::size_t j = 1; j <= garch.beta.size(); ++j) {
      const double s2 = t >= j ? sigma2[t - j] : uncond;
      v += garch.beta[j - 1] * s2;
    }
    sigma2[t] = v;
    const double u = garch.innovation == Innovation::student_t
                         ? rng.student_t_unit_variance(garch.df)
                         : rng.normal();
    eps[t] = std::sqrt(v) * u;
    double value = arma.mu + eps[t];
    for (std::size_t i = 1; i <= p; ++i) value += arma.ar[i - 1] * (t >= i ? y[t - i] : 0.0);
    for (std::size_t j = 1; j <= q; ++j) value += arma.ma[j - 1] * (t >= j ? eps[t - j] : 0.0);
    y[t] = value;
  }

  ArmaGarchSim sim;
  sim.returns.assign(y.begin() + static_cast<std::ptrdiff_t>(burn_in), y.end());
  sim.variances.assign(sigma2.begin() + static_cast<std::ptrdiff_t>(burn_in), sigma2.end());
  sim.residuals.assign(eps.begin() + static_cast<std::ptrdiff_t>(burn_in), eps.end());
  return sim;
}

}  // namespace oilsignal
