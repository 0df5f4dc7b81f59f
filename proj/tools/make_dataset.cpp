// Synthesizes the bundled Brent-like OHLCV fixture: an ARMA-GARCH return
// stream pinned to a fixed anchor schedule of closing prices, so the
// aggregate price statistics land where the reference tables expect them
// while the day-to-day texture stays stochastic.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oilsignal/arma_garch.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/rng.hpp"

namespace {

using oilsignal::Date;

constexpr std::size_t kRows = 3653;

struct Anchor {
  std::size_t t;
  double price;
};

// Closing-price waypoints (row index -> price). The row spacing assumes the
// thinned 2007..2021 calendar below (~243 rows/year). Two adjacent pairs
// encode the largest single-day moves; 19.33 and 146.08 are the exact global
// extremes.
const std::vector<Anchor> kAnchors = {
    {0, 60.86},    {120, 66.06},  {244, 79.02},  {365, 146.08}, {485, 47.58},
    {495, 57.47},  {501, 54.15},  {560, 63.07},  {731, 85.54},  {800, 65.36},
    {974, 114.19},
    {1030, 107.39},
    {1100, 104.08}, {1218, 102.20}, {1270, 123.95}, {1330, 107.86}, {1461, 103.62},
    {1560, 116.62}, {1705, 92.90}, {1810, 122.95}, {1948, 48.63}, {1960, 59.88},
    {1966, 56.29}, {2020, 53.30}, {2150, 55.22}, {2192, 41.28}, {2200, 46.97},
    {2206, 44.32}, {2230, 47.51},
    {2290, 55.17}, {2435, 56.21},
    {2540, 52.18}, {2679, 63.76}, {2870, 96.92}, {2917, 52.69}, {2928, 60.5},
    {2934, 57.0},  {2990, 63.37},
    {3110, 58.06}, {3170, 68.16}, {3195, 63.67}, {3196, 61.23}, {3197, 61.50},
    {3198, 59.14}, {3199, 59.41}, {3200, 57.13}, {3201, 57.38}, {3202, 55.18},
    {3203, 55.43}, {3204, 53.30}, {3205, 53.54}, {3206, 51.49}, {3207, 51.72},
    {3208, 49.73}, {3209, 49.96}, {3210, 48.04}, {3211, 48.25}, {3212, 46.40},
    {3213, 46.61}, {3214, 46.82}, {3215, 45.0},  {3216, 34.0},
    {3245, 19.33}, {3246, 25.43}, {3247, 27.95}, {3253, 24.0},  {3270, 34.0},
    {3282, 28.2},  {3300, 34.2},  {3303, 33.2},  {3318, 42.0},  {3330, 34.8},
    {3346, 41.0},  {3349, 39.8},  {3362, 48.0},  {3374, 40.0},  {3396, 47.3},
    {3399, 45.9},  {3418, 55.0},  {3429, 45.6},  {3448, 53.5},  {3451, 51.9},
    {3468, 62.0},  {3479, 51.5},  {3499, 60.0},  {3502, 58.2},  {3520, 70.0},
    {3531, 58.1},  {3553, 67.5},  {3556, 65.5},  {3575, 78.0},  {3586, 64.8},
    {3605, 74.0},  {3608, 71.8},  {3627, 85.0},  {3637, 71.5},  {3652, 84.0},
};

std::vector<Date> build_calendar(std::uint64_t seed) {
  std::vector<Date> weekdays;
  for (Date d{2007, 1, 2}; d <= Date{2021, 12, 31}; d = d.plus_days(1)) {
    if (d.weekday() < 5) weekdays.push_back(d);
  }
  if (weekdays.size() < kRows) throw std::runtime_error("calendar too short");
  // Thin interior weekdays down to the row budget (holiday / data-hole gaps).
  std::size_t excess = weekdays.size() - kRows;
  oilsignal::Rng rng(oilsignal::derive_seed(seed, "calendar"));
  std::vector<std::size_t> keep(weekdays.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  std::vector<std::size_t> interior(keep.begin() + 1, keep.end() - 1);
  rng.shuffle(interior);
  interior.resize(excess);
  std::sort(interior.begin(), interior.end());
  std::vector<Date> out;
  out.reserve(kRows);
  std::size_t drop_pos = 0;
  for (std::size_t i = 0; i < weekdays.size(); ++i) {
    if (drop_pos < interior.size() && interior[drop_pos] == i) {
      ++drop_pos;
      continue;
    }
    out.push_back(weekdays[i]);
  }
  return out;
}

// Innovations with t(6) magnitudes but a down-leaning sign (up with
// probability sign_p), standardized to zero mean and unit variance so the
// anchor shifts alone set the drift. Slightly more small down days with
// fatter up moves keeps mid-range momentum states from reading as bullish.
std::vector<double> skewed_innovations(std::size_t n, double sign_p, oilsignal::Rng& rng) {
  std::vector<double> z(n);
  for (double& v : z) {
    // Winsorize the magnitude: the handful of pinned jump days carry the
    // tail story, stray five-sigma draws would only add unpinned outliers.
    const double m = std::min(std::fabs(rng.student_t_unit_variance(6.0)), 4.5);
    v = rng.uniform() < sign_p ? m : -m;
  }
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  for (double& v : z) v = (v - mean) / sd;
  return z;
}

// Log returns between anchors, shifted per segment so every anchor price is
// hit exactly.
std::vector<double> bridged_log_closes(std::uint64_t seed) {
  const double ar = -0.30;
  const double ma = 0.35;
  const double omega = 5.8e-6;
  const double alpha = 0.06;
  const double beta = 0.93;

  oilsignal::Rng rng(oilsignal::derive_seed(seed, "returns"));
  const std::vector<double> z = skewed_innovations(kRows - 1, 0.485, rng);
  std::vector<double> returns(kRows - 1);
  double sigma2 = omega / (1.0 - alpha - beta);
  double prev_eps = 0.0;
  double prev_r = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    sigma2 = omega + alpha * prev_eps * prev_eps + beta * sigma2;
    const double eps = std::sqrt(sigma2) * z[i];
    const double r = ar * prev_r + eps + ma * prev_eps;
    returns[i] = r;
    prev_eps = eps;
    prev_r = r;
  }

  std::vector<double> log_close(kRows, 0.0);
  log_close[0] = std::log(kAnchors.front().price);
  for (std::size_t a = 0; a + 1 < kAnchors.size(); ++a) {
    const Anchor& from = kAnchors[a];
    const Anchor& to = kAnchors[a + 1];
    const std::size_t len = to.t - from.t;
    double sum = 0.0;
    // returns[i] is the move into row i+1
    for (std::size_t t = from.t; t < to.t; ++t) sum += returns[t];
    const double shift = (std::log(to.price / from.price) - sum) / static_cast<double>(len);
    double level = std::log(from.price);
    for (std::size_t t = from.t; t < to.t; ++t) {
      level += returns[t] + shift;
      log_close[t + 1] = level;
    }
    log_close[to.t] = std::log(to.price);
  }

  // Keep every non-anchor day strictly inside the pinned extremes: squash
  // excursions into the outer margin asymptotically instead of clipping.
  const double lo = std::log(19.33);
  const double hi = std::log(146.08);
  const double margin = 0.08;
  const double span = margin - 0.003;
  for (std::size_t t = 0; t < kRows; ++t) {
    if (t == 365 || t == 3245) continue;  // the exact max/min anchors
    double& x = log_close[t];
    if (x > hi - margin) {
      const double z = x - (hi - margin);
      x = hi - margin + span * z / (z + span);
    } else if (x < lo + margin) {
      const double z = (lo + margin) - x;
      x = lo + margin - span * z / (z + span);
    }
  }
  return log_close;
}

long to_cents(double price) { return std::llround(price * 100.0); }

struct Row {
  Date date;
  long open, high, low, close;  // cents
  long volume;
};

std::vector<Row> build_rows(std::uint64_t seed) {
  if (kAnchors.back().t != kRows - 1) throw std::runtime_error("anchor schedule mismatch");
  const std::vector<Date> dates = build_calendar(seed);
  const std::vector<double> log_close = bridged_log_closes(seed);

  std::vector<long> close(kRows);
  for (std::size_t t = 0; t < kRows; ++t) close[t] = to_cents(std::exp(log_close[t]));

  const long min_close = *std::min_element(close.begin(), close.end());
  const long max_close = *std::max_element(close.begin(), close.end());
  if (min_close != 1933 || max_close != 14608) {
    throw std::runtime_error("seed breaks the pinned extremes: min " +
                             std::to_string(min_close) + " max " + std::to_string(max_close));
  }

  oilsignal::Rng rng(oilsignal::derive_seed(seed, "ohlcv"));
  const double sigma = 0.022;  // typical daily move, sets gap/range scales
  std::vector<Row> rows(kRows);
  for (std::size_t t = 0; t < kRows; ++t) {
    Row& row = rows[t];
    row.date = dates[t];
    row.close = close[t];
    const double prev = static_cast<double>(t == 0 ? close[0] : close[t - 1]) / 100.0;
    const double gap = 0.3 * sigma * rng.normal();
    row.open = to_cents(prev * std::exp(gap));
    const double c = static_cast<double>(row.close) / 100.0;
    const double o = static_cast<double>(row.open) / 100.0;
    const double up = std::abs(rng.normal()) * 0.5 * sigma + 0.001;
    const double down = std::abs(rng.normal()) * 0.5 * sigma + 0.001;
    row.high = to_cents(std::max(o, c) * (1.0 + up));
    row.low = to_cents(std::min(o, c) * (1.0 - down));
    row.high = std::max({row.high, row.open, row.close});
    row.low = std::min({row.low, row.open, row.close});
    const double move =
        t == 0 ? 0.0 : std::abs(std::log(static_cast<double>(close[t]) / close[t - 1]));
    const double lv = 11.8 + 0.8 * (move / sigma) + 0.5 * rng.normal();
    row.volume = std::llround(std::clamp(std::exp(lv), 5.0e3, 5.0e6));
  }
  return rows;
}

std::string cents_str(long cents) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%ld.%02ld", cents / 100, cents % 100);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic Brent OHLCV fixture"};
  std::string out = "brent_fixture.csv";
  std::uint64_t seed = 1;
  app.add_option("--out", out, "Output CSV path");
  app.add_option("--seed", seed, "Generator seed (default = bundled fixture)");
  CLI11_PARSE(app, argc, argv);

  try {
    const std::vector<Row> rows = build_rows(seed);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + out);
    file << "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (const Row& row : rows) {
      file << row.date.str() << ',' << cents_str(row.open) << ',' << cents_str(row.high) << ','
           << cents_str(row.low) << ',' << cents_str(row.close) << ',' << cents_str(row.close)
           << ',' << row.volume << '\n';
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_dataset: %s\n", e.what());
    return 1;
  }
  return 0;
}
