#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "oilsignal/arma_garch.hpp"
#include "oilsignal/backtest.hpp"
#include "oilsignal/evaluation.hpp"
#include "oilsignal/hyper_search.hpp"
#include "oilsignal/knn.hpp"
#include "oilsignal/lstm.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/random_forest.hpp"
#include "oilsignal/svr.hpp"

namespace oilsignal {

// ordered_json keeps insertion order, so identical runs serialize
// byte-for-byte. All keys snake_case.
using json = nlohmann::ordered_json;

json to_json(const ArmaParams& params);
json to_json(const GarchParams& params);
json to_json(const ArmaFit& fit);
json to_json(const GarchFit& fit);
json to_json(const OrderSelection& selection);

// Forest as nested node records (one array per tree).
json to_json(const Forest& forest);

// Support vectors and dual coefficients.
json to_json(const SvrModel& model);

// Flat map of named tensors; matrices emitted row-major with their shape.
json to_json(const LstmModel& model);

// kNN keeps no parameters beyond its configuration and the training frame
// it scans, so the model document is that reference.
json knn_to_json(const KnnConfig& config, const LabeledFrame& train);

json to_json(const PerformanceReport& report);
json to_json(const ConfusionMatrix& cm);
json to_json(const ClassReport& report);
json to_json(const ImportanceResult& importance);
json to_json(const CvResult& result);
json to_json(const ExtremeAccuracy& extremes);
json to_json(const SearchResult& result);
json to_json(const CleanReport& report);

// UTF-8, two-space indent, trailing newline.
void write_json(const std::string& path, const json& value);

// Header `date,position,daily_return,cumulative`.
void write_equity_csv(const std::string& path, const EquityCurve& curve);

// Canonical price CSV (same header the loader expects).
void write_prices_csv(const std::string& path, const PriceSeries& series);

void write_text(const std::string& path, const std::string& text);

// Round-trip decimal formatting (shortest form that parses back exactly).
std::string format_double(double value);

}  // namespace oilsignal
