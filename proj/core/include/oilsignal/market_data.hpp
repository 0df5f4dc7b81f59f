#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oilsignal {

// Calendar date (no time zone). Comparison is field-lexicographic which
// matches chronological order.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  static Date parse(std::string_view iso);  // "YYYY-MM-DD"
  std::string str() const;
  std::string month_key() const;  // "YYYY-MM"

  // Days since 1970-01-01; negative before that.
  long serial() const;
  static Date from_serial(long serial);
  Date plus_days(long n) const { return from_serial(serial() + n); }
  int weekday() const;  // 0 = Monday ... 6 = Sunday
};

// One daily OHLCV observation. Fields may be NaN before cleaning; finite
// bars must satisfy low <= min(open, close) <= max(open, close) <= high and
// volume >= 0, which load_csv enforces.
struct PriceBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double adj_close = 0.0;
  double volume = 0.0;

  bool complete() const;  // all six fields finite
};

// Bars with strictly increasing dates.
class PriceSeries {
 public:
  PriceSeries() = default;
  explicit PriceSeries(std::vector<PriceBar> bars);  // sorts, rejects duplicate dates

  std::size_t size() const { return bars_.size(); }
  bool empty() const { return bars_.empty(); }
  const PriceBar& operator[](std::size_t i) const { return bars_[i]; }
  std::span<const PriceBar> bars() const { return bars_; }

  std::vector<double> closes() const;
  std::vector<Date> dates() const;

 private:
  std::vector<PriceBar> bars_;
};

// Log or simple returns; dates are those of the later bar of each pair.
struct ReturnSeries {
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

enum class SignalAlphabet {
  zero_one,    // {0, 1}
  directional  // {-1, +1}
};

// Integer-coded signals restricted to one alphabet.
struct SignalSeries {
  std::vector<Date> dates;
  std::vector<int> values;
  SignalAlphabet alphabet = SignalAlphabet::zero_one;

  std::size_t size() const { return values.size(); }
  int low_code() const { return alphabet == SignalAlphabet::zero_one ? 0 : -1; }
  int high_code() const { return 1; }
  void validate() const;  // throws if any value is outside the alphabet
};

// Per-column affine [0,1] scaling fitted on training rows.
struct ColumnScale {
  double min = 0.0;
  double max = 1.0;
  double apply(double x) const { return (x - min) / (max - min); }
  double invert(double y) const { return min + y * (max - min); }
};

struct ScalerInfo {
  std::map<std::string, ColumnScale> columns;
};

// Aligned feature matrix with one label per row. The label at row t refers
// to step t+1 (signal of the next return, or the next close). next_return
// keeps the realized log return the label was derived from, which strategy
// evaluation needs.
struct LabeledFrame {
  std::vector<Date> dates;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> features;  // [column][row]
  std::vector<double> labels;
  std::vector<double> next_returns;
  std::optional<ScalerInfo> scaling;

  std::size_t rows() const { return dates.size(); }
  std::size_t cols() const { return features.size(); }
  std::vector<double> row(std::size_t r) const;
  LabeledFrame slice(std::size_t begin, std::size_t end) const;  // [begin, end)
  void validate() const;  // column lengths, completeness
};

struct CleanReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::map<std::string, std::size_t> dropped_by_rule;  // rule -> count
};

// Parse CSV text with header `Date,Open,High,Low,Close,Adj Close,Volume`.
// Empty, "null", "na", or "nan" numeric fields become NaN (cleaned later);
// otherwise fields must parse fully. Rows arrive in any order; output is
// sorted by date. Throws std::runtime_error naming the 1-based data row on
// malformed input, duplicate dates, or invariant-violating finite bars.
PriceSeries parse_csv(std::string_view text);

PriceSeries load_csv(const std::string& path);

// Plain HTTP GET returning the response body. Throws on connection failure,
// non-200 status, or a payload that does not look like CSV text.
std::string fetch_remote(const std::string& url);

// Drop bars with missing/non-finite fields. Order preserved. Throws if
// fewer than 2 rows survive. Fills `report` when given.
PriceSeries clean(const PriceSeries& series, CleanReport* report = nullptr);

ReturnSeries log_returns(const PriceSeries& series);
ReturnSeries simple_returns(const PriceSeries& series);

// Signal_t = high code iff return_{t+1} > 0, low code otherwise (ties low).
// Output has length n-1; the last return labels nothing. Dates are the
// return dates at which each signal stands.
SignalSeries make_signal(const ReturnSeries& returns, SignalAlphabet alphabet);

// floor(n * fraction) rows to the training side.
std::size_t split_index(std::size_t n, double train_fraction);

std::pair<LabeledFrame, LabeledFrame> chrono_split(const LabeledFrame& frame,
                                                   double train_fraction);
std::pair<ReturnSeries, ReturnSeries> chrono_split(const ReturnSeries& series,
                                                   double train_fraction);

// Scale the named feature columns to [0,1] using training min/max; test rows
// use the same affine map and may fall outside [0,1]. Throws on a constant
// training column. Both outputs carry the fitted metadata.
std::pair<LabeledFrame, LabeledFrame> minmax_scale(const LabeledFrame& train,
                                                   const LabeledFrame& test,
                                                   const std::vector<std::string>& columns);

}  // namespace oilsignal
