#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oilsignal/backtest.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/rng.hpp"

using namespace oilsignal;

namespace {

ReturnSeries returns_on(const std::vector<double>& values, Date start = {2020, 1, 2}) {
  ReturnSeries r;
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.dates.push_back(start.plus_days(static_cast<long>(i)));
    r.values.push_back(values[i]);
  }
  return r;
}

SignalSeries signals_on(const std::vector<int>& values, Date start,
                        SignalAlphabet alphabet = SignalAlphabet::zero_one) {
  SignalSeries s;
  s.alphabet = alphabet;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.dates.push_back(start.plus_days(static_cast<long>(i)));
    s.values.push_back(values[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (StrategyKind kind :
       {StrategyKind::buy_and_hold, StrategyKind::only_long, StrategyKind::long_short}) {
    CHECK(strategy_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(strategy_from_string("martingale"), std::runtime_error);
}

TEST_CASE("prealigned simulation maps signals to positions") {
  const ReturnSeries rets = returns_on({0.10, -0.20, 0.30, -0.10});
  const SignalSeries sig = signals_on({1, 0, 1, 0}, rets.dates.front());

  const EquityCurve only_long = simulate_prealigned(sig, rets, StrategyKind::only_long);
  CHECK(only_long.positions == std::vector<int>{1, 0, 1, 0});
  CHECK(only_long.daily_log_returns == std::vector<double>{0.10, 0.0, 0.30, 0.0});
  CHECK(only_long.cumulative.back() == doctest::Approx(std::exp(0.4) - 1.0).epsilon(1e-12));

  const EquityCurve long_short = simulate_prealigned(sig, rets, StrategyKind::long_short);
  CHECK(long_short.positions == std::vector<int>{1, -1, 1, -1});
  CHECK(long_short.daily_log_returns == std::vector<double>{0.10, 0.20, 0.30, 0.10});

  const EquityCurve hold = simulate_prealigned(sig, rets, StrategyKind::buy_and_hold);
  CHECK(hold.positions == std::vector<int>{1, 1, 1, 1});
  CHECK(hold.cumulative.back() == doctest::Approx(std::exp(0.1) - 1.0).epsilon(1e-12));

  // Directional alphabet: -1 plays the low-code role.
  const SignalSeries dir = signals_on({1, -1, 1, -1}, rets.dates.front(),
                                      SignalAlphabet::directional);
  const EquityCurve dir_long = simulate_prealigned(dir, rets, StrategyKind::only_long);
  CHECK(dir_long.positions == only_long.positions);
}

TEST_CASE("prealigned simulation rejects mismatched dates") {
  const ReturnSeries rets = returns_on({0.1, 0.2});
  SignalSeries sig = signals_on({1, 0}, rets.dates.front());
  sig.dates[1] = sig.dates[1].plus_days(1);
  CHECK_THROWS_AS(simulate_prealigned(sig, rets, StrategyKind::only_long), std::runtime_error);

  const SignalSeries short_sig = signals_on({1}, rets.dates.front());
  CHECK_THROWS_AS(simulate_prealigned(short_sig, rets, StrategyKind::only_long),
                  std::runtime_error);
}

TEST_CASE("label-convention simulation trades the next bar") {
  // Signals stand on days 1..3; returns realize on days 2..4.
  ReturnSeries rets = returns_on({0.05, -0.02, 0.04}, Date{2020, 3, 2});
  const SignalSeries sig = signals_on({1, 1, 0}, Date{2020, 3, 1});

  const EquityCurve curve = simulate(sig, rets, StrategyKind::only_long);
  REQUIRE(curve.positions.size() == 3);
  CHECK(curve.positions == std::vector<int>{1, 1, 0});
  CHECK(curve.daily_log_returns == std::vector<double>{0.05, -0.02, 0.0});
  CHECK(curve.dates == rets.dates);
}

TEST_CASE("a trailing signal with nothing to trade is dropped") {
  ReturnSeries rets = returns_on({0.05, -0.02}, Date{2020, 3, 2});
  const SignalSeries sig = signals_on({1, 0, 1}, Date{2020, 3, 1});  // last signal dangles
  const EquityCurve curve = simulate(sig, rets, StrategyKind::only_long);
  CHECK(curve.positions == std::vector<int>{1, 0});
}

TEST_CASE("misaligned inputs are rejected") {
  // The first signal has no return after it.
  ReturnSeries rets = returns_on({0.05, 0.01}, Date{2020, 3, 2});
  SignalSeries sig = signals_on({1, 1}, Date{2020, 3, 5});
  CHECK_THROWS_AS(simulate(sig, rets, StrategyKind::only_long), std::runtime_error);

  // Signals that skip a return break the consecutive-match requirement.
  ReturnSeries gap = returns_on({0.05, 0.01, -0.02}, Date{2020, 3, 2});
  SignalSeries skip;
  skip.alphabet = SignalAlphabet::zero_one;
  skip.dates = {Date{2020, 3, 1}, Date{2020, 3, 3}};  // matches returns 0 and 2, skipping 1
  skip.values = {1, 1};
  CHECK_THROWS_AS(simulate(skip, gap, StrategyKind::only_long), std::runtime_error);
}

TEST_CASE("sharpe annualizes by sqrt 252 and guards degenerate inputs") {
  const std::vector<double> r = {0.01, -0.005, 0.02, 0.0, 0.015};
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= r.size();
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= r.size() - 1;
  CHECK(sharpe(r) == doctest::Approx(std::sqrt(252.0) * mean / std::sqrt(var)).epsilon(1e-12));

  CHECK_THROWS_AS(sharpe(std::vector<double>{0.01}), std::runtime_error);
  CHECK_THROWS_AS(sharpe(std::vector<double>{0.01, 0.01, 0.01}), std::runtime_error);
}

TEST_CASE("profit factor splits gains over losses and flags the no-loss case") {
  const auto [pf, infinite] = profit_factor(std::vector<double>{0.02, -0.01, 0.03, -0.04});
  CHECK(!infinite);
  CHECK(pf == doctest::Approx(0.05 / 0.05).epsilon(1e-12));

  const auto [pf2, inf2] = profit_factor(std::vector<double>{0.02, 0.0, 0.03});
  CHECK(inf2);

  const auto [pf3, inf3] = profit_factor(std::vector<double>{-0.02, -0.03});
  CHECK(!inf3);
  CHECK(pf3 == doctest::Approx(0.0));
}

TEST_CASE("drawdown tracks the running peak") {
  const std::vector<double> wealth = {1.0, 1.2, 0.9, 1.1, 1.3, 0.8};
  const DrawdownResult dd = max_drawdown(wealth);
  REQUIRE(dd.drawdown.size() == wealth.size());
  CHECK(dd.drawdown[0] == doctest::Approx(0.0));
  CHECK(dd.drawdown[2] == doctest::Approx(0.9 / 1.2 - 1.0).epsilon(1e-12));
  CHECK(dd.drawdown[4] == doctest::Approx(0.0));
  CHECK(dd.max_drawdown == doctest::Approx(0.8 / 1.3 - 1.0).epsilon(1e-12));
  for (double d : dd.drawdown) CHECK(d <= 0.0);

  // Monotone growth never draws down.
  CHECK(max_drawdown(std::vector<double>{1.0, 1.1, 1.2}).max_drawdown == doctest::Approx(0.0));
}

TEST_CASE("curve drawdown works on wealth, not log returns") {
  const ReturnSeries rets = returns_on({0.1, -0.3, 0.05});
  const SignalSeries sig = signals_on({1, 1, 1}, rets.dates.front());
  const EquityCurve curve = simulate_prealigned(sig, rets, StrategyKind::buy_and_hold);
  const DrawdownResult dd = max_drawdown(curve);
  // Wealth path: e^0.1, e^-0.2, e^-0.15; trough at e^-0.2 from peak e^0.1.
  CHECK(dd.max_drawdown == doctest::Approx(std::exp(-0.3) - 1.0).epsilon(1e-12));
}

TEST_CASE("monthly returns compound within each calendar month") {
  ReturnSeries rets;
  rets.dates = {Date{2020, 1, 30}, Date{2020, 1, 31}, Date{2020, 2, 3}, Date{2020, 2, 4}};
  rets.values = {0.01, 0.02, -0.01, 0.03};
  SignalSeries aligned;
  aligned.alphabet = SignalAlphabet::zero_one;
  aligned.dates = rets.dates;
  aligned.values = {1, 1, 1, 1};

  const EquityCurve curve = simulate_prealigned(aligned, rets, StrategyKind::buy_and_hold);
  const std::map<std::string, double> monthly = monthly_returns(curve);
  REQUIRE(monthly.size() == 2);
  CHECK(monthly.at("2020-01") == doctest::Approx(std::exp(0.03) - 1.0).epsilon(1e-12));
  CHECK(monthly.at("2020-02") == doctest::Approx(std::exp(0.02) - 1.0).epsilon(1e-12));

  // Telescoping identity against the full-window cumulative return.
  double product = 1.0;
  for (const auto& [key, value] : monthly) product *= 1.0 + value;
  CHECK(product == doctest::Approx(1.0 + curve.cumulative.back()).epsilon(1e-12));
}

TEST_CASE("performance report assembles the four metrics") {
  Rng rng(55);
  std::vector<double> values(300);
  for (double& v : values) v = 0.01 * rng.normal() + 0.0005;
  const ReturnSeries rets = returns_on(values);
  SignalSeries sig;
  sig.alphabet = SignalAlphabet::zero_one;
  sig.dates = rets.dates;
  sig.values.assign(rets.size(), 1);

  const EquityCurve curve = simulate_prealigned(sig, rets, StrategyKind::buy_and_hold);
  const PerformanceReport report = performance(curve);
  REQUIRE(report.sharpe_ratio.has_value());
  CHECK(*report.sharpe_ratio == doctest::Approx(sharpe(curve)).epsilon(1e-12));
  CHECK(report.profit_factor == doctest::Approx(profit_factor(curve).first).epsilon(1e-12));
  CHECK(!report.profit_factor_infinite);
  CHECK(report.max_drawdown == doctest::Approx(max_drawdown(curve).max_drawdown).epsilon(1e-12));
  CHECK(report.monthly_returns == monthly_returns(curve));

  // Zero-variance curve: sharpe is absent rather than thrown.
  SignalSeries flat_sig;
  flat_sig.alphabet = SignalAlphabet::zero_one;
  ReturnSeries flat;
  for (int i = 0; i < 5; ++i) {
    flat.dates.push_back(Date{2020, 5, 1}.plus_days(i));
    flat.values.push_back(0.01);
    flat_sig.dates.push_back(flat.dates.back());
    flat_sig.values.push_back(1);
  }
  const PerformanceReport degenerate =
      performance(simulate_prealigned(flat_sig, flat, StrategyKind::buy_and_hold));
  CHECK(!degenerate.sharpe_ratio.has_value());
  CHECK(degenerate.profit_factor_infinite);
}

TEST_CASE("crossover signal flips where the fast average crosses the slow") {
  // Price staircase: long decline then sharp recovery produces one downward
  // and one upward crossing of SMA(2) against SMA(4).
  std::vector<PriceBar> bars;
  const std::vector<double> closes = {10, 11, 12, 13, 14, 13, 12, 11, 10, 9,
                                      8,  7,  8,  10, 12, 14, 16, 18, 20, 22};
  for (std::size_t i = 0; i < closes.size(); ++i) {
    PriceBar bar;
    bar.date = Date{2020, 6, 1}.plus_days(static_cast<long>(i));
    bar.open = bar.high = bar.low = bar.close = bar.adj_close = closes[i];
    bar.volume = 1.0;
    bars.push_back(bar);
  }
  const PriceSeries series{bars};
  const SignalSeries sig = cross_signal(series, 2, 4);
  REQUIRE(sig.size() == closes.size() - 3);  // starts when SMA(4) is defined
  CHECK(sig.dates.front() == series[3].date);

  // Compute both averages directly and compare the comparison.
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const std::size_t t = i + 3;
    const double fast = (closes[t] + closes[t - 1]) / 2.0;
    const double slow = (closes[t] + closes[t - 1] + closes[t - 2] + closes[t - 3]) / 4.0;
    REQUIRE(sig.values[i] == (fast > slow ? 1 : 0));
  }

  // The directional variant recodes lows as -1.
  const SignalSeries dir = cross_signal(series, 2, 4, SignalAlphabet::directional);
  for (std::size_t i = 0; i < dir.size(); ++i) {
    REQUIRE(dir.values[i] == (sig.values[i] == 1 ? 1 : -1));
  }
}
