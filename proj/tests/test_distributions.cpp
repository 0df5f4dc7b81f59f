#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oilsignal/distributions.hpp"

using namespace oilsignal;

TEST_CASE("normal cdf hits textbook values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(normal_cdf(3.0) == doctest::Approx(0.9986501019683699).epsilon(1e-9));
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-8));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("chi-squared survival function matches known quantiles") {
  // 95th percentile of chi2(2) is 5.991464547; of chi2(1) is 3.841458821.
  CHECK(chi_squared_sf(5.991464547107979, 2.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(chi_squared_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(chi_squared_sf(0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("regularized incomplete gamma pair sums to one") {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double x : {0.1, 1.0, 5.0, 20.0}) {
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  // gamma_p(1, x) = 1 - exp(-x) exactly.
  CHECK(gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("incomplete beta reproduces closed forms") {
  // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
  CHECK(incomplete_beta(1.0, 3.0, 0.4) ==
        doctest::Approx(1.0 - std::pow(0.6, 3.0)).epsilon(1e-10));
  CHECK(incomplete_beta(2.5, 1.0, 0.7) == doctest::Approx(std::pow(0.7, 2.5)).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("student t cdf matches symmetry and known points") {
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-12));
  // 97.5th percentile of t(10) is 2.228138852.
  CHECK(student_t_cdf(2.2281388519649385, 10.0) == doctest::Approx(0.975).epsilon(1e-8));
  for (double t : {0.3, 1.2, 2.7}) {
    CHECK(student_t_cdf(-t, 7.0) == doctest::Approx(1.0 - student_t_cdf(t, 7.0)).epsilon(1e-10));
  }
  // t(df) approaches the normal as df grows.
  CHECK(student_t_cdf(1.0, 1e6) == doctest::Approx(normal_cdf(1.0)).epsilon(1e-5));
}

TEST_CASE("student t quantile inverts the cdf") {
  for (double p : {0.01, 0.1, 0.5, 0.9, 0.99}) {
    for (double df : {3.0, 6.0, 30.0}) {
      CHECK(student_t_cdf(student_t_quantile(p, df), df) == doctest::Approx(p).epsilon(1e-7));
    }
  }
}

TEST_CASE("log densities integrate against direct formulas") {
  // Standard normal at zero: -0.5*log(2*pi).
  CHECK(normal_log_density(0.0, 1.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
  // N(eps; 0, sigma2) at eps = 2, sigma2 = 4.
  CHECK(normal_log_density(2.0, 4.0) ==
        doctest::Approx(-0.9189385332046727 - 0.5 * std::log(4.0) - 0.5).epsilon(1e-12));

  // Unit-variance Student-t density integrates to one (midpoint rule, wide grid).
  const double df = 6.0;
  double integral = 0.0;
  const double h = 0.001;
  for (double x = -60.0; x < 60.0; x += h) {
    integral += h * std::exp(std_t_log_density(x + h / 2.0, 1.0, df));
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  // And has unit variance by construction.
  double second = 0.0;
  for (double x = -60.0; x < 60.0; x += h) {
    const double m = x + h / 2.0;
    second += h * m * m * std::exp(std_t_log_density(m, 1.0, df));
  }
  CHECK(second == doctest::Approx(1.0).epsilon(1e-4));

  // Scale property: density of sqrt(sigma2) * T evaluated at scaled points.
  CHECK(std_t_log_density(3.0, 4.0, df) ==
        doctest::Approx(std_t_log_density(1.5, 1.0, df) - 0.5 * std::log(4.0)).epsilon(1e-12));
}
