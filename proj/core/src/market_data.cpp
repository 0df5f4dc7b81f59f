#include "oilsignal/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

namespace oilsignal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double parse_numeric(const std::string& field, std::size_t row, const std::string& column) {
  const std::string low = lower(field);
  if (field.empty() || low == "null" || low == "na" || low == "nan" || low == "n/a") {
    return kNaN;
  }
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::runtime_error("market data row " + std::to_string(row) + ": field '" + column +
                             "' is not numeric: '" + field + "'");
  }
  return value;
}

}  // namespace

// --- Date ------------------------------------------------------------------

Date Date::parse(std::string_view iso) {
  const std::string s = trim(iso);
  auto fail = [&] { throw std::runtime_error("unparseable ISO date: '" + s + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail();
  }
  const int y = std::stoi(s.substr(0, 4));
  const int m = std::stoi(s.substr(5, 2));
  const int d = std::stoi(s.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31) fail();
  return Date{y, m, d};
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::month_key() const {
  char buf[12];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

long Date::serial() const {
  // Howard Hinnant's days-from-civil algorithm.
  long y = year;
  const long m = month;
  const long d = day;
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

Date Date::from_serial(long serial) {
  long z = serial + 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int Date::weekday() const {
  // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
  long w = (serial() + 3) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

// --- PriceBar / PriceSeries --------------------------------------------------

bool PriceBar::complete() const {
  return std::isfinite(open) && std::isfinite(high) && std::isfinite(low) &&
         std::isfinite(close) && std::isfinite(adj_close) && std::isfinite(volume);
}

PriceSeries::PriceSeries(std::vector<PriceBar> bars) : bars_(std::move(bars)) {
  std::stable_sort(bars_.begin(), bars_.end(),
                   [](const PriceBar& a, const PriceBar& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < bars_.size(); ++i) {
    if (bars_[i].date == bars_[i - 1].date) {
      throw std::runtime_error("duplicate date in price series: " + bars_[i].date.str());
    }
  }
}

std::vector<double> PriceSeries::closes() const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const PriceBar& b : bars_) out.push_back(b.close);
  return out;
}

std::vector<Date> PriceSeries::dates() const {
  std::vector<Date> out;
  out.reserve(bars_.size());
  for (const PriceBar& b : bars_) out.push_back(b.date);
  return out;
}

void SignalSeries::validate() const {
  if (dates.size() != values.size()) {
    throw std::runtime_error("signal series: dates and values lengths differ");
  }
  for (int v : values) {
    if (v != low_code() && v != high_code()) {
      throw std::runtime_error("signal value " + std::to_string(v) +
                               " outside the declared alphabet");
    }
  }
}

// --- LabeledFrame ------------------------------------------------------------

std::vector<double> LabeledFrame::row(std::size_t r) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& col : features) out.push_back(col[r]);
  return out;
}

LabeledFrame LabeledFrame::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) throw std::out_of_range("frame slice out of range");
  LabeledFrame out;
  out.dates.assign(dates.begin() + begin, dates.begin() + end);
  out.feature_names = feature_names;
  out.features.reserve(features.size());
  for (const auto& col : features) {
    out.features.emplace_back(col.begin() + begin, col.begin() + end);
  }
  out.labels.assign(labels.begin() + begin, labels.begin() + end);
  out.next_returns.assign(next_returns.begin() + begin, next_returns.begin() + end);
  out.scaling = scaling;
  return out;
}

void LabeledFrame::validate() const {
  if (feature_names.size() != features.size()) {
    throw std::runtime_error("frame: feature name/column count mismatch");
  }
  for (const auto& col : features) {
    if (col.size() != dates.size()) throw std::runtime_error("frame: ragged feature column");
    for (double v : col) {
      if (!std::isfinite(v)) throw std::runtime_error("frame: non-finite feature value");
    }
  }
  if (labels.size() != dates.size()) throw std::runtime_error("frame: label column length mismatch");
  if (next_returns.size() != dates.size()) {
    throw std::runtime_error("frame: next_returns length mismatch");
  }
}

// --- CSV ----------------------------------------------------------------------

PriceSeries parse_csv(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = i + 1;
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw std::runtime_error("CSV input is empty");

  const std::vector<std::string> header = split_fields(lines.front());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[lower(header[i])] = i;
  const char* needed[] = {"date", "open", "high", "low", "close", "adj close", "volume"};
  for (const char* name : needed) {
    if (!index.count(name)) {
      throw std::runtime_error(std::string("CSV header missing column '") + name + "'");
    }
  }
  if (lines.size() == 1) throw std::runtime_error("CSV has no data rows");

  std::vector<PriceBar> bars;
  bars.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (trim(lines[r]).empty()) continue;
    const std::vector<std::string> f = split_fields(lines[r]);
    if (f.size() != header.size()) {
      throw std::runtime_error("market data row " + std::to_string(r) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(f.size()));
    }
    PriceBar bar;
    try {
      bar.date = Date::parse(f[index["date"]]);
    } catch (const std::exception& e) {
      throw std::runtime_error("market data row " + std::to_string(r) + ": " + e.what());
    }
    bar.open = parse_numeric(f[index["open"]], r, "Open");
    bar.high = parse_numeric(f[index["high"]], r, "High");
    bar.low = parse_numeric(f[index["low"]], r, "Low");
    bar.close = parse_numeric(f[index["close"]], r, "Close");
    bar.adj_close = parse_numeric(f[index["adj close"]], r, "Adj Close");
    bar.volume = parse_numeric(f[index["volume"]], r, "Volume");
    if (bar.complete()) {
      const double body_low = std::min(bar.open, bar.close);
      const double body_high = std::max(bar.open, bar.close);
      if (!(bar.low <= body_low && body_high <= bar.high) || bar.volume < 0.0 ||
          bar.low <= 0.0) {
        throw std::runtime_error("market data row " + std::to_string(r) +
                                 ": OHLC ordering or volume invariant violated");
      }
    }
    bars.push_back(bar);
  }
  if (bars.empty()) throw std::runtime_error("CSV has no data rows");
  return PriceSeries(std::move(bars));
}

PriceSeries load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open market data file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string fetch_remote(const std::string& url) {
  std::string scheme, host, path = "/";
  std::size_t pos = url.find("://");
  if (pos == std::string::npos) throw std::runtime_error("unsupported URL (need http://): " + url);
  scheme = url.substr(0, pos);
  if (scheme != "http") {
    throw std::runtime_error("unsupported URL scheme '" + scheme + "' (plain http only): " + url);
  }
  const std::size_t host_start = pos + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) {
    host = url.substr(host_start);
  } else {
    host = url.substr(host_start, slash - host_start);
    path = url.substr(slash);
  }
  httplib::Client client(("http://" + host).c_str());
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);
  httplib::Result res = client.Get(path.c_str());
  if (!res) {
    throw std::runtime_error("network error fetching " + url + ": " +
                             httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw std::runtime_error("HTTP status " + std::to_string(res->status) + " fetching " + url);
  }
  const std::string& body = res->body;
  if (body.find(',') == std::string::npos || body.find('\n') == std::string::npos) {
    throw std::runtime_error("response from " + url + " does not look like CSV");
  }
  return body;
}

// --- Cleaning / returns --------------------------------------------------------

PriceSeries clean(const PriceSeries& series, CleanReport* report) {
  std::vector<PriceBar> kept;
  kept.reserve(series.size());
  std::size_t dropped = 0;
  for (const PriceBar& bar : series.bars()) {
    if (bar.complete()) {
      kept.push_back(bar);
    } else {
      ++dropped;
    }
  }
  if (report) {
    report->rows_in = series.size();
    report->rows_out = kept.size();
    report->dropped_by_rule.clear();
    report->dropped_by_rule["missing_or_nonfinite_field"] = dropped;
  }
  if (kept.size() < 2) {
    throw std::runtime_error("insufficient data: fewer than 2 complete rows after cleaning");
  }
  return PriceSeries(std::move(kept));
}

namespace {

ReturnSeries returns_impl(const PriceSeries& series, bool log_form) {
  if (series.size() < 2) throw std::runtime_error("need at least 2 bars to compute returns");
  ReturnSeries out;
  out.dates.reserve(series.size() - 1);
  out.values.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double prev = series[i].close;
    const double next = series[i + 1].close;
    if (!(prev > 0.0) || !(next > 0.0)) {
      throw std::runtime_error("non-positive close at " + series[i + 1].date.str());
    }
    out.dates.push_back(series[i + 1].date);
    out.values.push_back(log_form ? std::log(next / prev) : (next - prev) / prev);
  }
  return out;
}

}  // namespace

ReturnSeries log_returns(const PriceSeries& series) { return returns_impl(series, true); }

ReturnSeries simple_returns(const PriceSeries& series) { return returns_impl(series, false); }

SignalSeries make_signal(const ReturnSeries& returns, SignalAlphabet alphabet) {
  if (returns.values.empty()) throw std::runtime_error("make_signal: empty return series");
  SignalSeries out;
  out.alphabet = alphabet;
  const std::size_t n = returns.values.size();
  out.dates.reserve(n - 1);
  out.values.reserve(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    out.dates.push_back(returns.dates[t]);
    out.values.push_back(returns.values[t + 1] > 0.0 ? out.high_code() : out.low_code());
  }
  return out;
}

std::size_t split_index(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0,1)");
  }
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
}

std::pair<LabeledFrame, LabeledFrame> chrono_split(const LabeledFrame& frame,
                                                   double train_fraction) {
  const std::size_t cut = split_index(frame.rows(), train_fraction);
  if (cut == 0 || cut == frame.rows()) {
    throw std::runtime_error("chronological split leaves an empty side");
  }
  return {frame.slice(0, cut), frame.slice(cut, frame.rows())};
}

std::pair<ReturnSeries, ReturnSeries> chrono_split(const ReturnSeries& series,
                                                   double train_fraction) {
  const std::size_t cut = split_index(series.size(), train_fraction);
  if (cut == 0 || cut == series.size()) {
    throw std::runtime_error("chronological split leaves an empty side");
  }
  ReturnSeries train, test;
  train.dates.assign(series.dates.begin(), series.dates.begin() + cut);
  train.values.assign(series.values.begin(), series.values.begin() + cut);
  test.dates.assign(series.dates.begin() + cut, series.dates.end());
  test.values.assign(series.values.begin() + cut, series.values.end());
  return {train, test};
}

std::pair<LabeledFrame, LabeledFrame> minmax_scale(const LabeledFrame& train,
                                                   const LabeledFrame& test,
                                                   const std::vector<std::string>& columns) {
  LabeledFrame train_out = train;
  LabeledFrame test_out = test;
  ScalerInfo info = train.scaling.value_or(ScalerInfo{});
  for (const std::string& name : columns) {
    const auto it = std::find(train.feature_names.begin(), train.feature_names.end(), name);
    if (it == train.feature_names.end()) {
      throw std::runtime_error("minmax_scale: no such column '" + name + "'");
    }
    const std::size_t c = static_cast<std::size_t>(it - train.feature_names.begin());
    const auto [lo_it, hi_it] =
        std::minmax_element(train.features[c].begin(), train.features[c].end());
    if (train.features[c].empty() || !(*hi_it > *lo_it)) {
      throw std::runtime_error("minmax_scale: column '" + name + "' is constant on training rows");
    }
    const ColumnScale scale{*lo_it, *hi_it};
    for (double& v : train_out.features[c]) v = scale.apply(v);
    for (double& v : test_out.features[c]) v = scale.apply(v);
    info.columns[name] = scale;
  }
  train_out.scaling = info;
  test_out.scaling = info;
  return {train_out, test_out};
}

}  // namespace oilsignal
