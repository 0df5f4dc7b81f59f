#include "oilsignal/serialize.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace oilsignal {

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

json vector_json(const Eigen::VectorXd& v) {
  json data = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v(i));
  return json{{"shape", {v.size()}}, {"data", std::move(data)}};
}

void add_layer_tensors(json& out, const std::string& prefix, const LstmLayer& layer) {
  out[prefix + ".w_i"] = matrix_json(layer.w_i);
  out[prefix + ".w_f"] = matrix_json(layer.w_f);
  out[prefix + ".w_g"] = matrix_json(layer.w_g);
  out[prefix + ".w_o"] = matrix_json(layer.w_o);
  out[prefix + ".b_i"] = vector_json(layer.b_i);
  out[prefix + ".b_f"] = vector_json(layer.b_f);
  out[prefix + ".b_g"] = vector_json(layer.b_g);
  out[prefix + ".b_o"] = vector_json(layer.b_o);
}

json optional_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

json frame_json(const LabeledFrame& frame) {
  json dates = json::array();
  for (const Date& d : frame.dates) dates.push_back(d.str());
  json features = json::object();
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    features[frame.feature_names[c]] = frame.features[c];
  }
  return json{{"rows", frame.rows()},
              {"feature_names", frame.feature_names},
              {"dates", std::move(dates)},
              {"features", std::move(features)},
              {"labels", frame.labels}};
}

}  // namespace

json to_json(const ArmaParams& params) {
  return json{{"mu", params.mu}, {"ar", params.ar}, {"ma", params.ma}};
}

json to_json(const GarchParams& params) {
  return json{{"omega", params.omega},
              {"alpha", params.alpha},
              {"beta", params.beta},
              {"df", params.df},
              {"innovation", params.innovation == Innovation::student_t ? "student_t" : "normal"},
              {"persistence", params.persistence()}};
}

json to_json(const ArmaFit& fit) {
  return json{{"params", to_json(fit.params)},
              {"log_likelihood", fit.log_likelihood},
              {"bic", fit.bic},
              {"n", fit.n},
              {"converged", fit.converged}};
}

json to_json(const GarchFit& fit) {
  return json{{"arma", to_json(fit.arma)},
              {"garch", to_json(fit.garch)},
              {"log_likelihood", fit.log_likelihood},
              {"bic", fit.bic},
              {"n", fit.residuals.size()},
              {"garch_boundary", fit.garch_boundary}};
}

json to_json(const OrderSelection& selection) {
  json table = json::array();
  for (const OrderCandidate& c : selection.table) {
    table.push_back(json{{"p", c.p},
                         {"q", c.q},
                         {"bic", c.ok ? json(c.bic) : json(nullptr)},
                         {"log_likelihood", c.ok ? json(c.log_likelihood) : json(nullptr)},
                         {"ok", c.ok},
                         {"error", c.error}});
  }
  return json{{"p", selection.p}, {"q", selection.q}, {"table", std::move(table)}};
}

json to_json(const Forest& forest) {
  json trees = json::array();
  for (const DecisionTree& tree : forest.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      nodes.push_back(json{{"feature", node.feature},
                           {"threshold", node.threshold},
                           {"left", node.left},
                           {"right", node.right},
                           {"counts", {node.counts[0], node.counts[1]}}});
    }
    trees.push_back(json{{"nodes", std::move(nodes)}});
  }
  return json{{"model", "random_forest"},
              {"n_trees", forest.config.n_trees},
              {"max_features", forest.config.max_features},
              {"max_depth", forest.config.max_depth},
              {"min_samples_split", forest.config.min_samples_split},
              {"min_samples_leaf", forest.config.min_samples_leaf},
              {"seed", forest.config.seed},
              {"feature_names", forest.feature_names},
              {"trees", std::move(trees)}};
}

json to_json(const SvrModel& model) {
  return json{{"model", "svr"},
              {"gamma", model.gamma},
              {"bias", model.bias},
              {"converged", model.converged},
              {"iterations", model.iterations},
              {"final_violation", model.final_violation},
              {"coefficients", model.coefficients},
              {"support_vectors", model.support_vectors}};
}

json to_json(const LstmModel& model) {
  json tensors = json::object();
  add_layer_tensors(tensors, "lstm1", model.layer1);
  add_layer_tensors(tensors, "lstm2", model.layer2);
  tensors["dense1.w"] = matrix_json(model.dense1.w);
  tensors["dense1.b"] = vector_json(model.dense1.b);
  tensors["dense2.w"] = matrix_json(model.dense2.w);
  tensors["dense2.b"] = vector_json(model.dense2.b);
  return json{{"model", "lstm"}, {"tensors", std::move(tensors)}};
}

json knn_to_json(const KnnConfig& config, const LabeledFrame& train) {
  return json{{"model", "knn"},
              {"k", config.k},
              {"leaf_size", config.leaf_size},
              {"train", frame_json(train)}};
}

json to_json(const PerformanceReport& report) {
  json monthly = json::object();
  for (const auto& [month, value] : report.monthly_returns) monthly[month] = value;
  // profit_factor is null (not +inf, which JSON cannot carry) when the
  // infinite flag is set.
  return json{{"sharpe_ratio", optional_json(report.sharpe_ratio)},
              {"profit_factor",
               report.profit_factor_infinite ? json(nullptr) : json(report.profit_factor)},
              {"profit_factor_infinite", report.profit_factor_infinite},
              {"max_drawdown", report.max_drawdown},
              {"monthly_returns", std::move(monthly)}};
}

json to_json(const ConfusionMatrix& cm) {
  return json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

json to_json(const ClassReport& report) {
  auto row = [](const ClassMetrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"support", m.support},
                {"zero_division", m.zero_division}};
  };
  return json{{"down", row(report.down)}, {"up", row(report.up)}, {"accuracy", report.accuracy}};
}

json to_json(const ImportanceResult& importance) {
  json drops = json::object();
  for (const auto& [name, drop] : importance.mean_drops) drops[name] = drop;
  json shares = json::object();
  for (const auto& [name, share] : importance.shares) shares[name] = share;
  return json{{"baseline_accuracy", importance.baseline_accuracy},
              {"mean_drops", std::move(drops)},
              {"shares", std::move(shares)},
              {"uniform_fallback", importance.uniform_fallback}};
}

json to_json(const CvResult& result) {
  json folds = json::array();
  for (const CvFold& fold : result.folds) {
    folds.push_back(json{{"fold", fold.fold},
                         {"ok", fold.ok},
                         {"error", fold.error},
                         {"accuracy", fold.ok ? json(fold.accuracy) : json(nullptr)},
                         {"sharpe_only_long", optional_json(fold.sharpe_only_long)},
                         {"sharpe_long_short", optional_json(fold.sharpe_long_short)}});
  }
  return json{{"folds", std::move(folds)},
              {"mean_accuracy", result.mean_accuracy},
              {"mean_sharpe_only_long", optional_json(result.mean_sharpe_only_long)},
              {"mean_sharpe_long_short", optional_json(result.mean_sharpe_long_short)},
              {"any_failed", result.any_failed}};
}

json to_json(const ExtremeAccuracy& extremes) {
  json buckets = json::array();
  for (const ExtremeBucket& bucket : extremes.buckets) {
    buckets.push_back(json{{"level", bucket.level},
                           {"lower", bucket.lower},
                           {"upper", bucket.upper},
                           {"count", bucket.count},
                           {"accuracy", optional_json(bucket.accuracy)}});
  }
  return json{{"accuracy_regular", extremes.accuracy_regular},
              {"count_total", extremes.count_total},
              {"buckets", std::move(buckets)}};
}

json to_json(const SearchResult& result) {
  json trials = json::array();
  for (const SearchTrial& trial : result.trials) {
    json params = json::object();
    for (const auto& [name, value] : trial.params) params[name] = value;
    trials.push_back(json{{"index", trial.index},
                          {"params", std::move(params)},
                          {"score", trial.ok ? json(trial.score) : json(nullptr)},
                          {"ok", trial.ok},
                          {"error", trial.error}});
  }
  json best = json::object();
  for (const auto& [name, value] : result.best_params) best[name] = value;
  return json{{"best_params", std::move(best)},
              {"best_score", result.best_score},
              {"trials", std::move(trials)}};
}

json to_json(const CleanReport& report) {
  json dropped = json::object();
  for (const auto& [rule, count] : report.dropped_by_rule) dropped[rule] = count;
  return json{{"rows_in", report.rows_in},
              {"rows_out", report.rows_out},
              {"dropped", report.rows_in - report.rows_out},
              {"dropped_by_rule", std::move(dropped)}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const json& value) {
  write_text(path, value.dump(2) + "\n");
}

std::string format_double(double value) {
  char buffer[32];
  const std::to_chars_result res = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, res.ptr);
}

void write_equity_csv(const std::string& path, const EquityCurve& curve) {
  std::string text = "date,position,daily_return,cumulative\n";
  for (std::size_t i = 0; i < curve.dates.size(); ++i) {
    text += curve.dates[i].str();
    text += ',';
    text += std::to_string(curve.positions[i]);
    text += ',';
    text += format_double(curve.daily_log_returns[i]);
    text += ',';
    text += format_double(curve.cumulative[i]);
    text += '\n';
  }
  write_text(path, text);
}

void write_prices_csv(const std::string& path, const PriceSeries& series) {
  std::string text = "Date,Open,High,Low,Close,Adj Close,Volume\n";
  for (const PriceBar& bar : series.bars()) {
    text += bar.date.str();
    text += ',';
    text += format_double(bar.open);
    text += ',';
    text += format_double(bar.high);
    text += ',';
    text += format_double(bar.low);
    text += ',';
    text += format_double(bar.close);
    text += ',';
    text += format_double(bar.adj_close);
    text += ',';
    text += format_double(bar.volume);
    text += '\n';
  }
  write_text(path, text);
}

}  // namespace oilsignal
