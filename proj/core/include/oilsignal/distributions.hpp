#pragma once

// Special functions and distribution helpers shared by the statistics and
// volatility-model code: regularized incomplete gamma/beta, normal and
// Student-t cdf/quantile pairs.

namespace oilsignal {

// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of a chi-squared variable with df degrees of freedom.
double chi_squared_sf(double x, double df);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double normal_cdf(double x);
double normal_quantile(double p);

// cdf/quantile of the Student t distribution with df > 0 (unstandardized).
double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

// log density of the unit-variance (standardized) Student t with df > 2,
// evaluated at eps with scale sigma: the innovation density used by the
// volatility models.
double std_t_log_density(double eps, double sigma2, double df);

double normal_log_density(double eps, double sigma2);

}  // namespace oilsignal
