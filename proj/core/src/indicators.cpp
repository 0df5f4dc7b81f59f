#include "oilsignal/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oilsignal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

IndicatorSeries blank(std::size_t size, std::size_t warmup) {
  IndicatorSeries out;
  out.values.assign(size, kNaN);
  out.warmup = warmup;
  return out;
}

}  // namespace

IndicatorSeries sma(std::span<const double> values, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sma: window must be >= 1");
  if (values.size() < n) throw std::invalid_argument("sma: window longer than series");
  IndicatorSeries out = blank(values.size(), n - 1);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    window_sum += values[i];
    if (i >= n) window_sum -= values[i - n];
    if (i + 1 >= n) out.values[i] = window_sum / static_cast<double>(n);
  }
  return out;
}

IndicatorSeries ema(std::span<const double> values, std::size_t n) {
  if (n < 1) throw std::invalid_argument("ema: window must be >= 1");
  if (values.size() < n) throw std::invalid_argument("ema: window longer than series");
  IndicatorSeries out = blank(values.size(), n - 1);
  double seed = 0.0;
  for (std::size_t i = 0; i < n; ++i) seed += values[i];
  seed /= static_cast<double>(n);
  const double k = 2.0 / (static_cast<double>(n) + 1.0);
  out.values[n - 1] = seed;
  for (std::size_t i = n; i < values.size(); ++i) {
    out.values[i] = k * values[i] + (1.0 - k) * out.values[i - 1];
  }
  return out;
}

IndicatorSeries rsi(std::span<const double> close, std::size_t n) {
  if (n < 1) throw std::invalid_argument("rsi: period must be >= 1");
  if (close.size() <= n) throw std::invalid_argument("rsi: insufficient data");
  IndicatorSeries out = blank(close.size(), n);
  for (std::size_t t = n; t < close.size(); ++t) {
    double sum_up = 0.0;
    double sum_down = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double change = close[t - i] - close[t - i - 1];
      if (change > 0.0) {
        sum_up += change;
      } else {
        sum_down -= change;
      }
    }
    const double avg_up = sum_up / static_cast<double>(n);
    const double avg_down = sum_down / static_cast<double>(n);
    double value;
    if (avg_up == 0.0 && avg_down == 0.0) {
      value = 50.0;
    } else if (avg_down == 0.0) {
      value = 100.0;
    } else if (avg_up == 0.0) {
      value = 0.0;
    } else {
      value = 100.0 - 100.0 / (1.0 + avg_up / avg_down);
    }
    out.values[t] = value;
  }
  return out;
}

IndicatorSeries stochastic_k(const PriceSeries& series, std::size_t n) {
  if (n < 1) throw std::invalid_argument("stochastic_k: period must be >= 1");
  if (series.size() < n) throw std::invalid_argument("stochastic_k: insufficient data");
  IndicatorSeries out = blank(series.size(), n - 1);
  out.dates = series.dates();
  for (std::size_t t = n - 1; t < series.size(); ++t) {
    double high = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      high = std::max(high, series[t - i].high);
      low = std::min(low, series[t - i].low);
    }
    const double range = high - low;
    out.values[t] = range > 0.0 ? 100.0 * (series[t].close - low) / range : 50.0;
  }
  return out;
}

IndicatorSeries macd(std::span<const double> close, std::size_t fast, std::size_t slow) {
  if (fast >= slow) throw std::invalid_argument("macd: fast window must be shorter than slow");
  if (close.size() <= slow) throw std::invalid_argument("macd: insufficient data");
  const IndicatorSeries f = ema(close, fast);
  const IndicatorSeries s = ema(close, slow);
  IndicatorSeries out = blank(close.size(), slow - 1);
  for (std::size_t i = out.warmup; i < close.size(); ++i) {
    out.values[i] = f.values[i] - s.values[i];
  }
  return out;
}

IndicatorSeries roc(std::span<const double> close, std::size_t n) {
  if (n < 1) throw std::invalid_argument("roc: period must be >= 1");
  if (close.size() <= n) throw std::invalid_argument("roc: insufficient data");
  IndicatorSeries out = blank(close.size(), n);
  for (std::size_t t = n; t < close.size(); ++t) {
    const double base = close[t - n];
    if (base == 0.0) throw std::runtime_error("roc: zero historical close");
    out.values[t] = 100.0 * (close[t] - base) / base;
  }
  return out;
}

LabeledFrame build_features(const PriceSeries& series, const FeatureConfig& config,
                            LabelKind label) {
  const std::vector<double> close = series.closes();
  const std::size_t max_warmup =
      std::max({config.rsi_period, config.roc_period, config.macd_slow - 1, config.k_period - 1});
  if (series.size() < max_warmup + 2) {
    throw std::runtime_error("build_features: series too short for indicator warmup plus label");
  }
  const IndicatorSeries rsi_s = rsi(close, config.rsi_period);
  const IndicatorSeries roc_s = roc(close, config.roc_period);
  const IndicatorSeries macd_s = macd(close, config.macd_fast, config.macd_slow);
  const IndicatorSeries k_s = stochastic_k(series, config.k_period);
  const ReturnSeries rets = log_returns(series);  // rets[i] = ln(close[i+1]/close[i])

  LabeledFrame frame;
  frame.feature_names = {"rsi", "roc", "macd", "k_percent"};
  frame.features.assign(4, {});
  // Row t needs all indicators defined at t and a next bar for the label.
  for (std::size_t t = max_warmup; t + 1 < series.size(); ++t) {
    frame.dates.push_back(series[t].date);
    frame.features[0].push_back(rsi_s.values[t]);
    frame.features[1].push_back(roc_s.values[t]);
    frame.features[2].push_back(macd_s.values[t]);
    frame.features[3].push_back(k_s.values[t]);
    const double next_return = rets.values[t];
    frame.next_returns.push_back(next_return);
    frame.labels.push_back(label == LabelKind::signal ? (next_return > 0.0 ? 1.0 : 0.0)
                                                      : series[t + 1].close);
  }
  if (frame.dates.empty()) throw std::runtime_error("build_features: no rows after warmup");
  frame.validate();
  return frame;
}

}  // namespace oilsignal
