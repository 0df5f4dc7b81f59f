#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oilsignal/distributions.hpp"
#include "oilsignal/rng.hpp"
#include "oilsignal/stats.hpp"

using namespace oilsignal;

TEST_CASE("quantile interpolates between order statistics") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  // h = (n-1)p = 0.75 -> between first and second order statistic.
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(v, 0.9) == doctest::Approx(3.7));

  const std::vector<double> unsorted = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(unsorted, 0.5) == doctest::Approx(2.5));

  const std::vector<double> one = {7.0};
  CHECK(quantile(one, 0.3) == doctest::Approx(7.0));
}

TEST_CASE("describe matches direct formulas") {
  const std::vector<double> v = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const DescriptiveSummary d = describe(v);
  CHECK(d.count == 8);
  CHECK(d.mean == doctest::Approx(5.0).epsilon(1e-12));
  // Sample std with n-1: sum of squared deviations = 32, var = 32/7.
  CHECK(d.std_dev == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
  CHECK(d.min == 2.0);
  CHECK(d.max == 9.0);
  CHECK(d.median == doctest::Approx(4.5));
  CHECK(d.q25 == doctest::Approx(4.0));
  CHECK(d.q75 == doctest::Approx(5.5));

  // Moment-based skewness / excess kurtosis against a direct computation.
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double c = x - 5.0;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= v.size();
  m3 /= v.size();
  m4 /= v.size();
  CHECK(d.skewness == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-12));
  CHECK(d.excess_kurtosis == doctest::Approx(m4 / (m2 * m2) - 3.0).epsilon(1e-12));
}

TEST_CASE("jarque-bera accepts gaussian data and rejects skewed data") {
  Rng rng(17);
  std::vector<double> gaussian(5000);
  for (double& x : gaussian) x = rng.normal();
  const JarqueBeraResult jb_ok = jarque_bera(gaussian);
  CHECK(!jb_ok.normality_rejected);

  std::vector<double> skewed(5000);
  for (double& x : skewed) x = rng.gamma(2.0, 1.0);
  const JarqueBeraResult jb_bad = jarque_bera(skewed);
  CHECK(jb_bad.normality_rejected);
  CHECK(jb_bad.statistic > 5.991);

  // Statistic formula check on a small fixed vector.
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 10.0};
  const DescriptiveSummary d = describe(v);
  const double s = d.skewness, k = d.excess_kurtosis;
  const double expect = v.size() / 6.0 * (s * s + k * k / 4.0);
  CHECK(jarque_bera(v).statistic == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("acf matches the direct estimator and bands are 1.96/sqrt(n)") {
  Rng rng(23);
  const std::size_t n = 400;
  std::vector<double> x(n);
  double prev = 0.0;
  for (double& v : x) {
    prev = 0.6 * prev + rng.normal();
    v = prev;
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);

  const std::vector<CorrelogramPoint> got = acf(x, 5);
  REQUIRE(got.size() == 5);
  for (std::size_t lag = 1; lag <= 5; ++lag) {
    double num = 0.0;
    for (std::size_t t = lag; t < n; ++t) num += (x[t] - mean) * (x[t - lag] - mean);
    CHECK(got[lag - 1].lag == lag);
    CHECK(got[lag - 1].value == doctest::Approx(num / denom).epsilon(1e-12));
    CHECK(got[lag - 1].confidence_band == doctest::Approx(1.96 / std::sqrt(n)).epsilon(1e-12));
  }
}

TEST_CASE("pacf of an AR(1) cuts off after lag one") {
  Rng rng(29);
  const std::size_t n = 20000;
  std::vector<double> x(n);
  double prev = 0.0;
  for (double& v : x) {
    prev = 0.7 * prev + rng.normal();
    v = prev;
  }
  const std::vector<CorrelogramPoint> p = pacf(x, 6);
  REQUIRE(p.size() == 6);
  CHECK(p[0].value == doctest::Approx(0.7).epsilon(0.05));
  for (std::size_t lag = 2; lag <= 6; ++lag) {
    CHECK(std::fabs(p[lag - 1].value) < 0.03);  // ~ N(0, 1/n)
  }

  // lag-1 pacf equals lag-1 acf by definition.
  const std::vector<CorrelogramPoint> a = acf(x, 1);
  CHECK(p[0].value == doctest::Approx(a[0].value).epsilon(1e-12));
}

TEST_CASE("ljung-box statistic matches its formula and flags dependence") {
  Rng rng(31);
  const std::size_t n = 500;
  std::vector<double> iid(n);
  for (double& v : iid) v = rng.normal();

  const std::vector<std::size_t> lags = {5, 10};
  const std::vector<LjungBoxPoint> got = ljung_box(iid, lags);
  REQUIRE(got.size() == 2);

  const std::vector<CorrelogramPoint> rho = acf(iid, 10);
  for (std::size_t idx = 0; idx < lags.size(); ++idx) {
    double q = 0.0;
    for (std::size_t k = 1; k <= lags[idx]; ++k) {
      const double r = rho[k - 1].value;
      q += r * r / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * (n + 2.0);
    CHECK(got[idx].statistic == doctest::Approx(q).epsilon(1e-10));
    CHECK(got[idx].p_value ==
          doctest::Approx(chi_squared_sf(q, static_cast<double>(lags[idx]))).epsilon(1e-10));
  }
  CHECK(got[1].p_value > 0.01);  // iid noise: no rejection

  // Strongly autocorrelated input is rejected decisively.
  std::vector<double> ar(n);
  double prev = 0.0;
  for (double& v : ar) {
    prev = 0.8 * prev + rng.normal();
    v = prev;
  }
  CHECK(ljung_box(ar, lags)[1].p_value < 1e-6);
}

TEST_CASE("adf default lag follows the rule of thumb") {
  CHECK(adf_default_lag(100) == 12);
  CHECK(adf_default_lag(3653) == std::size_t(12 * std::pow(36.53, 0.25)));
  CHECK(adf_default_lag(50) == std::size_t(12 * std::pow(0.5, 0.25)));
}

TEST_CASE("adf keeps the unit root for a random walk and rejects for white noise") {
  Rng rng(37);
  const std::size_t n = 2000;
  std::vector<double> walk(n), noise(n);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    level += rng.normal();
    walk[i] = level;
    noise[i] = rng.normal();
  }
  const AdfResult on_walk = adf_test(walk, 5);
  CHECK(!on_walk.unit_root_rejected);
  CHECK(on_walk.statistic > -2.86);
  CHECK(on_walk.lag_order == 5);

  const AdfResult on_noise = adf_test(noise, 5);
  CHECK(on_noise.unit_root_rejected);
  CHECK(on_noise.statistic < -2.86);
}

TEST_CASE("qq points pair order statistics with reference quantiles") {
  Rng rng(41);
  std::vector<double> x(101);
  for (double& v : x) v = rng.normal();
  const std::vector<QqPoint> pts = qq_points(x, QqReference::normal);
  REQUIRE(pts.size() == x.size());

  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].sample == doctest::Approx(sorted[i]).epsilon(1e-12));
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(pts.size());
    REQUIRE(pts[i].theoretical == doctest::Approx(normal_quantile(p)).epsilon(1e-9));
  }

  const std::vector<QqPoint> t_pts = qq_points(x, QqReference::student_t, 6.0);
  CHECK(t_pts[0].theoretical ==
        doctest::Approx(student_t_quantile(0.5 / 101.0, 6.0)).epsilon(1e-9));
}
