#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "oilsignal/rng.hpp"

using namespace oilsignal;

TEST_CASE("fnv1a64 matches reference digests") {
  // Reference values from the FNV-1a specification.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derive_seed mixes the label into the master seed") {
  CHECK(derive_seed(0, "x") == fnv1a64("x"));
  CHECK(derive_seed(42, "rf") == (42ULL ^ fnv1a64("rf")));
  CHECK(derive_seed(42, "rf") != derive_seed(42, "svr"));
  CHECK(derive_seed(1, "rf") != derive_seed(2, "rf"));
}

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123), c(124);
  bool all_equal = true, any_differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_differs = any_differs || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("uniform stays in [0,1) and uniform(lo,hi) in range") {
  Rng rng(7);
  double lo_seen = 1.0, hi_seen = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo_seen = std::min(lo_seen, u);
    hi_seen = std::max(hi_seen, u);
  }
  CHECK(lo_seen < 0.01);
  CHECK(hi_seen > 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 5.0);
    REQUIRE(v >= -3.0);
    REQUIRE(v < 5.0);
  }
}

TEST_CASE("uniform_int and index cover their range without excess") {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t v = rng.uniform_int(10);
    REQUIRE(v <= 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 11);  // all of 0..10 hit

  for (int i = 0; i < 1000; ++i) REQUIRE(rng.index(7) < 7);
}

TEST_CASE("normal has the right first two moments") {
  Rng rng(99);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("gamma sampler matches its mean and variance") {
  Rng rng(5);
  const double shape = 3.5, scale = 2.0;
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma(shape, scale);
    REQUIRE(g > 0.0);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(shape * scale).epsilon(0.02));
  CHECK(var == doctest::Approx(shape * scale * scale).epsilon(0.05));
}

TEST_CASE("student_t_unit_variance is standardized") {
  Rng rng(31);
  const double df = 6.0;
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = rng.student_t_unit_variance(df);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shuffle permutes without loss and depends on the seed") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;

  Rng a(1);
  a.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == w);
  CHECK(v != w);  // 50 elements: identity permutation is effectively impossible

  std::vector<int> v2(50);
  std::iota(v2.begin(), v2.end(), 0);
  Rng b(1);
  b.shuffle(v2);
  CHECK(v2 == v);
}
