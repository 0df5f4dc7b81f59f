#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

// Indicator values aligned with the input series. The first warmup entries
// are NaN (undefined); dates are filled when the input carried them.
struct IndicatorSeries {
  std::vector<Date> dates;
  std::vector<double> values;
  std::size_t warmup = 0;

  std::size_t size() const { return values.size(); }
  bool defined(std::size_t i) const { return i >= warmup; }
};

// Mean of the n most recent values ending at t. warmup = n-1.
IndicatorSeries sma(std::span<const double> values, std::size_t n);

// Exponential moving average, k = 2/(n+1), seeded with the SMA of the first
// n values. warmup = n-1.
IndicatorSeries ema(std::span<const double> values, std::size_t n);

// Relative strength index over the trailing n price changes with simple
// averages: RSI = 100 - 100/(1 + avg_up/avg_down). One-sided windows hit the
// limits (all-up -> 100, all-down -> 0); a windowful of zero changes is
// neutral 50. warmup = n.
IndicatorSeries rsi(std::span<const double> close, std::size_t n = 14);

// %K = 100*(C - L)/(H - L) with H/L the extreme high/low of the trailing n
// bars; a zero range is neutral 50. warmup = n-1.
IndicatorSeries stochastic_k(const PriceSeries& series, std::size_t n = 14);

// EMA(fast) - EMA(slow). warmup = slow-1.
IndicatorSeries macd(std::span<const double> close, std::size_t fast = 12, std::size_t slow = 26);

// 100*(C_t - C_{t-n})/C_{t-n}. warmup = n.
IndicatorSeries roc(std::span<const double> close, std::size_t n);

struct FeatureConfig {
  std::size_t rsi_period = 14;
  std::size_t roc_period = 9;
  std::size_t macd_fast = 12;
  std::size_t macd_slow = 26;
  std::size_t k_period = 14;
};

enum class LabelKind {
  signal,     // next-step direction per the {0,1} signal coding
  next_close  // next bar's close price (regression targets)
};

// Assemble the aligned feature frame: columns rsi, roc, macd, k_percent; the
// label refers to step t+1; rows with any undefined indicator or no next bar
// are dropped. Row count = len - max(warmup) - 1.
LabeledFrame build_features(const PriceSeries& series, const FeatureConfig& config = {},
                            LabelKind label = LabelKind::signal);

}  // namespace oilsignal
