#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

enum class StrategyKind {
  buy_and_hold,  // position 1 throughout
  only_long,     // high signal -> 1, low signal -> 0
  long_short     // high signal -> +1, low signal -> -1
};

std::string to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct EquityCurve {
  std::vector<Date> dates;
  std::vector<int> positions;
  std::vector<double> daily_log_returns;
  std::vector<double> cumulative;  // exp(running sum of log returns) - 1
};

struct DrawdownResult {
  double max_drawdown = 0.0;        // min over t of value_t / running_max_t - 1
  std::vector<double> drawdown;     // <= 0 everywhere
};

struct PerformanceReport {
  std::optional<double> sharpe_ratio;  // absent when return variance is zero
  double profit_factor = 0.0;
  bool profit_factor_infinite = false;  // no losing days
  double max_drawdown = 0.0;
  std::map<std::string, double> monthly_returns;  // "YYYY-MM" -> fraction
};

// Moving-average crossover state per bar: high code while SMA(fast) exceeds
// SMA(slow), low code otherwise. Values start at the first bar where both
// averages are defined and are dated at the observation bar, so feeding them
// through simulate() opens positions on the bar after a crossing.
SignalSeries cross_signal(const PriceSeries& series, std::size_t fast = 15,
                          std::size_t slow = 60,
                          SignalAlphabet alphabet = SignalAlphabet::zero_one);

// Signals and returns are pre-aligned: signal i was formed before return i
// and the position it implies earns return i. Dates must match exactly.
EquityCurve simulate_prealigned(const SignalSeries& signals, const ReturnSeries& returns,
                                StrategyKind kind);

// Label-convention alignment: the signal dated t acts on the first return
// dated after t. Every signal except possibly the last must have such a
// return, and the matched returns must be consecutive; otherwise the inputs
// are rejected as misaligned. A trailing signal beyond the last return is
// dropped (there is nothing left to trade).
EquityCurve simulate(const SignalSeries& signals, const ReturnSeries& returns,
                     StrategyKind kind);

// mean/std(n-1) of daily returns, annualized by sqrt(252); risk-free 0.
// Throws on fewer than 2 returns or zero variance.
double sharpe(std::span<const double> daily_returns);
double sharpe(const EquityCurve& curve);

// Sum of positive daily returns over |sum of negative|; infinite (flagged)
// when there are no losing days.
std::pair<double, bool> profit_factor(std::span<const double> daily_returns);
std::pair<double, bool> profit_factor(const EquityCurve& curve);

DrawdownResult max_drawdown(std::span<const double> values);
DrawdownResult max_drawdown(const EquityCurve& curve);  // on wealth exp(cumsum)

std::map<std::string, double> monthly_returns(const EquityCurve& curve);

PerformanceReport performance(const EquityCurve& curve);

}  // namespace oilsignal
