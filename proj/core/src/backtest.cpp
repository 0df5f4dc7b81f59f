#include "oilsignal/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oilsignal/indicators.hpp"

namespace oilsignal {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::buy_and_hold: return "buy_and_hold";
    case StrategyKind::only_long: return "only_long";
    case StrategyKind::long_short: return "long_short";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
  if (name == "buy_and_hold") return StrategyKind::buy_and_hold;
  if (name == "only_long") return StrategyKind::only_long;
  if (name == "long_short") return StrategyKind::long_short;
  throw std::invalid_argument("unknown strategy kind: " + name);
}

SignalSeries cross_signal(const PriceSeries& series, std::size_t fast, std::size_t slow,
                          SignalAlphabet alphabet) {
  if (series.size() <= slow) throw std::invalid_argument("cross_signal: insufficient data");
  const std::vector<double> close = series.closes();
  const IndicatorSeries f = sma(close, fast);
  const IndicatorSeries s = sma(close, slow);
  const std::size_t start = std::max(f.warmup, s.warmup);
  SignalSeries out;
  out.alphabet = alphabet;
  for (std::size_t t = start; t < series.size(); ++t) {
    out.dates.push_back(series[t].date);
    out.values.push_back(f.values[t] > s.values[t] ? out.high_code() : out.low_code());
  }
  return out;
}

namespace {

int map_position(int signal, const SignalSeries& signals, StrategyKind kind) {
  const bool high = signal == signals.high_code();
  switch (kind) {
    case StrategyKind::buy_and_hold: return 1;
    case StrategyKind::only_long: return high ? 1 : 0;
    case StrategyKind::long_short: return high ? 1 : -1;
  }
  return 0;
}

}  // namespace

EquityCurve simulate_prealigned(const SignalSeries& signals, const ReturnSeries& returns,
                                StrategyKind kind) {
  signals.validate();
  if (signals.size() != returns.size()) {
    throw std::runtime_error("simulate: signals and returns are misaligned (lengths differ)");
  }
  if (signals.dates != returns.dates) {
    throw std::runtime_error("simulate: signals and returns are misaligned (dates differ)");
  }
  EquityCurve curve;
  curve.dates = returns.dates;
  curve.positions.reserve(signals.size());
  curve.daily_log_returns.reserve(signals.size());
  curve.cumulative.reserve(signals.size());
  double running = 0.0;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const int pos = map_position(signals.values[i], signals, kind);
    const double r = pos * returns.values[i];
    running += r;
    curve.positions.push_back(pos);
    curve.daily_log_returns.push_back(r);
    curve.cumulative.push_back(std::exp(running) - 1.0);
  }
  return curve;
}

EquityCurve simulate(const SignalSeries& signals, const ReturnSeries& returns,
                     StrategyKind kind) {
  signals.validate();
  if (signals.size() == 0 || returns.size() == 0) {
    throw std::runtime_error("simulate: empty input");
  }
  // Match each signal with the first return dated after it.
  SignalSeries acting = signals;
  const auto first = std::upper_bound(returns.dates.begin(), returns.dates.end(),
                                      signals.dates.front());
  std::size_t j = static_cast<std::size_t>(first - returns.dates.begin());
  ReturnSeries acted;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < signals.size(); ++i, ++j) {
    if (j >= returns.size()) {
      if (i + 1 == signals.size()) break;  // trailing signal with nothing to trade
      throw std::runtime_error("simulate: signals and returns are misaligned");
    }
    if (!(returns.dates[j] > signals.dates[i])) {
      throw std::runtime_error("simulate: signals and returns are misaligned");
    }
    acted.dates.push_back(returns.dates[j]);
    acted.values.push_back(returns.values[j]);
    ++usable;
  }
  if (usable == 0) throw std::runtime_error("simulate: no tradable overlap");
  acting.dates.assign(acted.dates.begin(), acted.dates.end());
  acting.values.resize(usable);
  return simulate_prealigned(acting, acted, kind);
}

double sharpe(std::span<const double> daily_returns) {
  if (daily_returns.size() < 2) throw std::invalid_argument("sharpe: need at least 2 returns");
  double mean = 0.0;
  for (double r : daily_returns) mean += r;
  mean /= static_cast<double>(daily_returns.size());
  double ss = 0.0;
  for (double r : daily_returns) ss += (r - mean) * (r - mean);
  const double var = ss / (static_cast<double>(daily_returns.size()) - 1.0);
  if (var == 0.0) throw std::runtime_error("sharpe: zero return variance");
  return mean / std::sqrt(var) * std::sqrt(252.0);
}

double sharpe(const EquityCurve& curve) { return sharpe(std::span(curve.daily_log_returns)); }

std::pair<double, bool> profit_factor(std::span<const double> daily_returns) {
  double pos = 0.0, neg = 0.0;
  for (double r : daily_returns) {
    if (r > 0.0) pos += r;
    if (r < 0.0) neg -= r;
  }
  if (neg == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {pos / neg, false};
}

std::pair<double, bool> profit_factor(const EquityCurve& curve) {
  return profit_factor(std::span(curve.daily_log_returns));
}

DrawdownResult max_drawdown(std::span<const double> values) {
  DrawdownResult out;
  if (values.empty()) return out;
  out.drawdown.reserve(values.size());
  double peak = values.front();
  for (double v : values) {
    peak = std::max(peak, v);
    const double dd = v / peak - 1.0;
    out.drawdown.push_back(dd);
    out.max_drawdown = std::min(out.max_drawdown, dd);
  }
  return out;
}

DrawdownResult max_drawdown(const EquityCurve& curve) {
  std::vector<double> wealth;
  wealth.reserve(curve.cumulative.size());
  for (double c : curve.cumulative) wealth.push_back(1.0 + c);
  return max_drawdown(std::span(wealth));
}

std::map<std::string, double> monthly_returns(const EquityCurve& curve) {
  std::map<std::string, double> sums;
  for (std::size_t i = 0; i < curve.dates.size(); ++i) {
    sums[curve.dates[i].month_key()] += curve.daily_log_returns[i];
  }
  std::map<std::string, double> out;
  for (const auto& [month, total] : sums) out[month] = std::exp(total) - 1.0;
  return out;
}

PerformanceReport performance(const EquityCurve& curve) {
  PerformanceReport report;
  try {
    report.sharpe_ratio = sharpe(curve);
  } catch (const std::exception&) {
    report.sharpe_ratio = std::nullopt;
  }
  const auto [pf, infinite] = profit_factor(curve);
  report.profit_factor = pf;
  report.profit_factor_infinite = infinite;
  report.max_drawdown = max_drawdown(curve).max_drawdown;
  report.monthly_returns = monthly_returns(curve);
  return report;
}

}  // namespace oilsignal
