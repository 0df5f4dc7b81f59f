#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oilsignal/market_data.hpp"
#include "oilsignal/rng.hpp"

namespace oilsignal {

// y_t = mu + sum_i ar_i * y_{t-i} + eps_t + sum_j ma_j * eps_{t-j}
struct ArmaParams {
  double mu = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
};

enum class Innovation { student_t, normal };

// sigma2_t = omega + sum_i alpha_i * eps2_{t-i} + sum_j beta_j * sigma2_{t-j}.
// Note on naming: the source equation this reproduces prints alpha on the
// lagged variance and beta on the lagged squared residual, but its own
// fitted values (alpha ~ 0.06, beta ~ 0.94) only make sense with the
// standard roles used here: alpha (small) scales squared shocks, beta
// (large) carries variance persistence.
struct GarchParams {
  double omega = 1e-6;
  std::vector<double> alpha;  // on lagged squared residuals
  std::vector<double> beta;   // on lagged conditional variance
  double df = 6.0;            // Student-t degrees of freedom (> 2)
  Innovation innovation = Innovation::student_t;

  double persistence() const;  // sum(alpha) + sum(beta)
};

struct ArmaFit {
  ArmaParams params;
  std::vector<double> residuals;
  double log_likelihood = 0.0;  // Gaussian, variance concentrated out
  double bic = 0.0;             // k = p + q + 1
  std::size_t n = 0;
  bool converged = false;
  double final_spread = 0.0;  // optimizer's terminal value spread
};

struct GarchEstimate {
  GarchParams params;
  double log_likelihood = 0.0;
  bool converged = false;
  bool boundary = false;  // persistence hugging 1 (>= 0.999)
  double final_spread = 0.0;
};

// Two-stage fit of the full model plus everything forecasting needs.
struct GarchFit {
  ArmaParams arma;
  GarchParams garch;
  double log_likelihood = 0.0;  // innovation likelihood on the ARMA residuals
  double bic = 0.0;             // counts all estimated parameters
  std::vector<double> residuals;
  std::vector<double> conditional_variance_series;
  std::vector<double> standardized_residuals;
  std::vector<double> train_tail_returns;  // last p training returns, oldest first
  bool garch_boundary = false;
};

struct OrderCandidate {
  std::size_t p = 0;
  std::size_t q = 0;
  double bic = 0.0;
  double log_likelihood = 0.0;
  bool ok = false;
  std::string error;
};

struct OrderSelection {
  std::size_t p = 0;
  std::size_t q = 0;
  std::vector<OrderCandidate> table;
};

// Stationarity/invertibility checks (all characteristic roots outside the
// unit circle).
bool is_stationary(std::span<const double> ar);
bool is_invertible(std::span<const double> ma);

// Conditional sum-of-squares fit: Gaussian likelihood, pre-sample values at
// the sample mean, pre-sample residuals at zero, simplex optimizer over a
// stationarity/invertibility-preserving reparameterization. Throws on
// optimizer non-convergence.
ArmaFit fit_arma(std::span<const double> returns, std::size_t p, std::size_t q);

// Innovation maximum likelihood with the variance recursion seeded at the
// sample variance; constraints kept by construction (log/logistic maps, the
// degrees of freedom bounded to (2.05, 100]). Persistence at the boundary is
// reported, never clipped silently.
GarchEstimate fit_garch(std::span<const double> residuals, std::size_t n_arch = 1,
                        std::size_t m_garch = 1,
                        Innovation innovation = Innovation::student_t);

// Variance recursion on given residuals; pre-sample squared residuals and
// variances seeded at the sample variance of the residuals.
std::vector<double> conditional_variance(const GarchParams& params,
                                         std::span<const double> residuals);

// Fits every (p, q) in [0, p_max] x [0, q_max] and picks the lowest
// BIC = k*ln(n) - 2*logL, k = p+q+1.
OrderSelection select_order(std::span<const double> returns, std::size_t p_max = 3,
                            std::size_t q_max = 3);

GarchFit fit_arma_garch(std::span<const double> returns, std::size_t p = 1, std::size_t q = 1,
                        std::size_t n_arch = 1, std::size_t m_garch = 1,
                        Innovation innovation = Innovation::student_t);

// One-step-ahead conditional-mean forecasts rolled through the test window
// with static parameters: signal_t = +1 if the forecast is positive, else -1
// (zero counts as -1). The signal at index i predicts test return i and is
// dated at its realization date.
SignalSeries forecast_signal(const GarchFit& fit, const ReturnSeries& test_returns);

struct ArmaGarchSim {
  std::vector<double> returns;
  std::vector<double> variances;
  std::vector<double> residuals;
};

// Simulate an ARMA-GARCH path (after burn-in) with unit-variance Student-t
// or normal innovations.
ArmaGarchSim simulate_arma_garch(const ArmaParams& arma, const GarchParams& garch,
                                 std::size_t n, Rng& rng, std::size_t burn_in = 500);

}  // namespace oilsignal
