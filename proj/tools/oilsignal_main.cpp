// Command-line driver for the oilsignal pipeline: ingest (acquire + clean),
// backtest (fit, predict, evaluate per model), cv (ordered k-fold scores),
// and report (consolidated tables + plot-ready series). A single master seed
// pins every stochastic component through named derived streams, so reruns
// with identical inputs are byte-identical.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "oilsignal/arma_garch.hpp"
#include "oilsignal/backtest.hpp"
#include "oilsignal/evaluation.hpp"
#include "oilsignal/hyper_search.hpp"
#include "oilsignal/indicators.hpp"
#include "oilsignal/knn.hpp"
#include "oilsignal/lstm.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/random_forest.hpp"
#include "oilsignal/rng.hpp"
#include "oilsignal/serialize.hpp"
#include "oilsignal/svr.hpp"

namespace fs = std::filesystem;
using namespace oilsignal;

namespace {

constexpr int kSchemaVersion = 1;

const std::vector<std::string> kModelNames = {"arma_garch", "cross_signal", "lstm",
                                              "rf",         "svr",          "knn"};
const std::vector<std::string> kStrategyNames = {"buy_and_hold", "only_long", "long_short"};

struct RunConfig {
  std::string source;
  std::string model = "all";
  double split = 0.8;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t k = 5;
  std::vector<std::string> strategies = kStrategyNames;
  json search;  // optional hyperparameter-search block; empty when absent
};

std::string default_out() {
  const char* env = std::getenv("OILSIGNAL_OUT");
  return env != nullptr && *env != '\0' ? env : "oilsignal_out";
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  json doc = json::parse(in, nullptr, true);
  if (!doc.is_object()) throw std::runtime_error("config must be a JSON object: " + path);
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSchemaVersion) {
    throw std::runtime_error("config: schema_version " + std::to_string(kSchemaVersion) +
                             " required: " + path);
  }
  static const std::set<std::string> known = {"schema_version", "source", "model", "split",
                                              "seed",           "out",    "k",     "strategies",
                                              "search"};
  for (const auto& [key, value] : doc.items()) {
    if (known.find(key) == known.end()) {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  if (doc.contains("source")) cfg.source = doc["source"].get<std::string>();
  if (doc.contains("model")) cfg.model = doc["model"].get<std::string>();
  if (doc.contains("split")) cfg.split = doc["split"].get<double>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
  if (doc.contains("k")) cfg.k = doc["k"].get<std::size_t>();
  if (doc.contains("strategies")) {
    cfg.strategies = doc["strategies"].get<std::vector<std::string>>();
  }
  if (doc.contains("search")) cfg.search = doc["search"];
}

void validate(const RunConfig& cfg) {
  if (!(cfg.split > 0.0 && cfg.split < 1.0)) {
    throw std::invalid_argument("split must lie in (0, 1)");
  }
  if (cfg.model != "all" &&
      std::find(kModelNames.begin(), kModelNames.end(), cfg.model) == kModelNames.end()) {
    std::string names = "all";
    for (const std::string& name : kModelNames) names += "|" + name;
    throw std::invalid_argument("unknown model '" + cfg.model + "' (expected " + names + ")");
  }
  if (cfg.strategies.empty()) throw std::invalid_argument("no strategies selected");
  for (const std::string& name : cfg.strategies) {
    strategy_from_string(name);  // throws on unknown names
  }
}

std::vector<std::string> selected_models(const RunConfig& cfg) {
  if (cfg.model == "all") return kModelNames;
  return {cfg.model};
}

bool is_url(const std::string& source) {
  return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0;
}

PriceSeries load_source(const std::string& source, CleanReport* report = nullptr) {
  if (source.empty()) throw std::invalid_argument("--source is required");
  PriceSeries raw = is_url(source) ? parse_csv(fetch_remote(source)) : load_csv(source);
  return clean(raw, report);
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const RunConfig& cfg) {
  CleanReport report;
  PriceSeries series = load_source(cfg.source, &report);
  fs::create_directories(cfg.out);
  const fs::path out(cfg.out);
  write_prices_csv((out / "prices.csv").string(), series);

  json doc = {{"schema_version", kSchemaVersion}, {"source", cfg.source}};
  doc.update(to_json(report));
  doc["first_date"] = series[0].date.str();
  doc["last_date"] = series[series.size() - 1].date.str();
  write_json((out / "cleaning_report.json").string(), doc);

  std::printf("ingest: %zu rows (%zu dropped) -> %s\n", series.size(),
              report.rows_in - report.rows_out, (out / "prices.csv").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// backtest

// Everything the per-model runners share. Feature frames are split and
// scaled once; model runners pick the view they need.
struct BacktestContext {
  PriceSeries series;
  std::vector<double> closes;
  std::vector<Date> dates;
  ReturnSeries returns;
  ReturnSeries train_returns;
  ReturnSeries test_returns;
  LabeledFrame sig_train, sig_test;  // min-max scaled, direction labels
  LabeledFrame reg_train, reg_test;  // min-max scaled, next-close labels
  std::size_t frame_offset = 0;      // series index of feature row 0
  double split = 0.8;
  std::uint64_t seed = 1;
  std::map<std::string, std::map<std::string, double>> tuned;  // family -> best params
};

BacktestContext make_context(PriceSeries series, const RunConfig& cfg) {
  BacktestContext ctx;
  ctx.series = std::move(series);
  ctx.closes = ctx.series.closes();
  ctx.dates = ctx.series.dates();
  ctx.returns = log_returns(ctx.series);
  std::tie(ctx.train_returns, ctx.test_returns) = chrono_split(ctx.returns, cfg.split);
  ctx.split = cfg.split;
  ctx.seed = cfg.seed;

  LabeledFrame sig_frame = build_features(ctx.series, {}, LabelKind::signal);
  auto [sig_train, sig_test] = chrono_split(sig_frame, cfg.split);
  std::tie(ctx.sig_train, ctx.sig_test) =
      minmax_scale(sig_train, sig_test, sig_frame.feature_names);

  LabeledFrame reg_frame = build_features(ctx.series, {}, LabelKind::next_close);
  auto [reg_train, reg_test] = chrono_split(reg_frame, cfg.split);
  std::tie(ctx.reg_train, ctx.reg_test) =
      minmax_scale(reg_train, reg_test, reg_frame.feature_names);

  const auto it = std::lower_bound(ctx.dates.begin(), ctx.dates.end(), sig_frame.dates.front());
  ctx.frame_offset = static_cast<std::size_t>(it - ctx.dates.begin());
  return ctx;
}

// One evaluated model: signals aligned date-for-date with the returns they
// trade (dated at the realization bar), plus {0,1} truth/prediction codes.
struct ModelRun {
  SignalSeries signals;
  ReturnSeries returns;
  std::vector<int> y_true;
  std::vector<int> y_pred;
  json model_doc;
  std::optional<ImportanceResult> importances;
};

// Re-date frame-row predictions to the bar whose return they trade.
std::pair<SignalSeries, ReturnSeries> frame_window(const BacktestContext& ctx,
                                                   const LabeledFrame& test,
                                                   std::vector<int> values) {
  const std::size_t first = ctx.frame_offset + ctx.sig_train.rows();
  SignalSeries signals;
  signals.alphabet = SignalAlphabet::zero_one;
  ReturnSeries rets;
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const Date realized = ctx.dates.at(first + i + 1);
    signals.dates.push_back(realized);
    rets.dates.push_back(realized);
    rets.values.push_back(test.next_returns[i]);
  }
  signals.values = std::move(values);
  return {std::move(signals), std::move(rets)};
}

std::vector<int> frame_truth(const LabeledFrame& test) {
  std::vector<int> truth(test.rows());
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = test.labels[i] > 0.5 ? 1 : 0;
  return truth;
}

std::map<std::string, double> tuned_params(const BacktestContext& ctx, const std::string& name) {
  const auto it = ctx.tuned.find(name);
  return it == ctx.tuned.end() ? std::map<std::string, double>{} : it->second;
}

double param_or(const std::map<std::string, double>& params, const std::string& name,
                double fallback) {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

ModelRun run_arma_garch(const BacktestContext& ctx) {
  GarchFit fit = fit_arma_garch(ctx.train_returns.values);
  ModelRun run;
  run.signals = forecast_signal(fit, ctx.test_returns);
  run.returns = ctx.test_returns;
  run.y_true.resize(ctx.test_returns.size());
  run.y_pred.resize(ctx.test_returns.size());
  for (std::size_t i = 0; i < ctx.test_returns.size(); ++i) {
    run.y_true[i] = ctx.test_returns.values[i] > 0.0 ? 1 : 0;
    run.y_pred[i] = run.signals.values[i] > 0 ? 1 : 0;
  }
  run.model_doc = json{{"schema_version", kSchemaVersion}, {"model", "arma_garch"}};
  run.model_doc.update(to_json(fit));
  return run;
}

// The crossover is untrained, so it is evaluated over the full sample: the
// signal standing at bar t trades the return into bar t+1.
ModelRun run_cross_signal(const BacktestContext& ctx) {
  const SignalSeries cs = cross_signal(ctx.series);
  const auto it = std::lower_bound(ctx.dates.begin(), ctx.dates.end(), cs.dates.front());
  const std::size_t warm = static_cast<std::size_t>(it - ctx.dates.begin());

  ModelRun run;
  run.signals.alphabet = cs.alphabet;
  const std::size_t count = ctx.returns.size() - warm;  // bars warm .. n-2
  for (std::size_t i = 0; i < count; ++i) {
    run.signals.dates.push_back(ctx.returns.dates[warm + i]);
    run.signals.values.push_back(cs.values[i]);
    run.returns.dates.push_back(ctx.returns.dates[warm + i]);
    run.returns.values.push_back(ctx.returns.values[warm + i]);
  }
  run.y_pred = run.signals.values;
  run.y_true.resize(count);
  for (std::size_t i = 0; i < count; ++i) run.y_true[i] = run.returns.values[i] > 0.0 ? 1 : 0;
  run.model_doc = json{{"schema_version", kSchemaVersion},
                       {"model", "cross_signal"},
                       {"fast", 15},
                       {"slow", 60}};
  return run;
}

ModelRun run_rf(const BacktestContext& ctx) {
  const std::map<std::string, double> tuned = tuned_params(ctx, "rf");
  RfConfig config;
  config.n_trees = static_cast<std::size_t>(param_or(tuned, "n_trees", 169));
  config.max_features = static_cast<std::size_t>(param_or(tuned, "max_features", 2));
  config.max_depth = static_cast<std::size_t>(param_or(tuned, "max_depth", 4));
  config.min_samples_split =
      static_cast<std::size_t>(param_or(tuned, "min_samples_split", 49));
  config.min_samples_leaf = static_cast<std::size_t>(param_or(tuned, "min_samples_leaf", 1));
  config.seed = derive_seed(ctx.seed, "rf");

  const Forest forest = rf_train(ctx.sig_train, config);
  RfPrediction pred = rf_predict(forest, ctx.sig_test);

  ModelRun run;
  std::tie(run.signals, run.returns) =
      frame_window(ctx, ctx.sig_test, std::move(pred.signals.values));
  run.y_pred = run.signals.values;
  run.y_true = frame_truth(ctx.sig_test);
  run.model_doc = json{{"schema_version", kSchemaVersion}, {"model", "rf"}};
  run.model_doc.update(to_json(forest));
  run.importances = permutation_importance(
      [&forest](const LabeledFrame& frame) { return rf_predict(forest, frame).signals.values; },
      ctx.sig_test, 10, derive_seed(ctx.seed, "rf_importance"));
  return run;
}

ModelRun run_knn(const BacktestContext& ctx) {
  const std::map<std::string, double> tuned = tuned_params(ctx, "knn");
  KnnConfig config;
  config.k = static_cast<std::size_t>(param_or(tuned, "k", 5));
  config.leaf_size = static_cast<std::size_t>(param_or(tuned, "leaf_size", 30));

  KnnPrediction pred = knn_predict(ctx.sig_train, ctx.sig_test, config);

  ModelRun run;
  std::tie(run.signals, run.returns) =
      frame_window(ctx, ctx.sig_test, std::move(pred.signals.values));
  run.y_pred = run.signals.values;
  run.y_true = frame_truth(ctx.sig_test);
  run.model_doc = json{{"schema_version", kSchemaVersion}, {"model", "knn"}};
  run.model_doc.update(knn_to_json(config, ctx.sig_train));
  const LabeledFrame& train = ctx.sig_train;
  run.importances = permutation_importance(
      [&train, config](const LabeledFrame& frame) {
        return knn_predict(train, frame, config).signals.values;
      },
      ctx.sig_test, 10, derive_seed(ctx.seed, "knn_importance"));
  return run;
}

ModelRun run_svr(const BacktestContext& ctx) {
  const std::map<std::string, double> tuned = tuned_params(ctx, "svr");
  SvrConfig config;
  config.C = param_or(tuned, "C", config.C);
  config.epsilon = param_or(tuned, "epsilon", config.epsilon);
  const double gamma = param_or(tuned, "gamma", 0.0);
  if (gamma > 0.0) config.gamma = gamma;

  const SvrModel model = svr_train(ctx.reg_train, config);

  // Prior actual close for each test row (the close the predicted next close
  // is compared against).
  const std::size_t first = ctx.frame_offset + ctx.reg_train.rows();
  std::vector<double> prior(ctx.reg_test.rows());
  for (std::size_t i = 0; i < prior.size(); ++i) prior[i] = ctx.closes.at(first + i);

  SignalSeries raw = svr_predict_signals(model, ctx.reg_test, prior);

  ModelRun run;
  std::tie(run.signals, run.returns) =
      frame_window(ctx, ctx.reg_test, std::move(raw.values));
  run.y_pred = run.signals.values;
  run.y_true = frame_truth(ctx.sig_test);  // same rows, direction labels
  run.model_doc = json{{"schema_version", kSchemaVersion}, {"model", "svr"}};
  run.model_doc.update(to_json(model));
  run.importances = permutation_importance(
      [&model, &prior](const LabeledFrame& frame) {
        return svr_predict_signals(model, frame, prior).values;
      },
      ctx.reg_test, 10, derive_seed(ctx.seed, "svr_importance"));
  return run;
}

ModelRun run_lstm(const BacktestContext& ctx) {
  const std::size_t n = ctx.closes.size();
  const std::size_t s = split_index(n, ctx.split);
  const LstmArch arch;
  if (s <= static_cast<std::size_t>(arch.lag) + 1) {
    throw std::runtime_error("lstm: training window shorter than the lag");
  }

  ColumnScale scaler{ctx.closes[0], ctx.closes[0]};
  for (std::size_t i = 0; i < s; ++i) {
    scaler.min = std::min(scaler.min, ctx.closes[i]);
    scaler.max = std::max(scaler.max, ctx.closes[i]);
  }
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = scaler.apply(ctx.closes[i]);

  const WindowDataset train_windows =
      build_windows(std::span(scaled).first(s), arch.lag);
  TrainConfig train_config;
  train_config.seed = derive_seed(ctx.seed, "lstm");
  const TrainResult trained = lstm_train(train_windows, train_config, arch);

  // One window per test close: window i ends just before close s+i.
  const WindowDataset test_windows =
      build_windows(std::span(scaled).subspan(s - arch.lag), arch.lag);
  std::vector<double> prior(ctx.closes.begin() + static_cast<std::ptrdiff_t>(s) - 1,
                            ctx.closes.end() - 1);
  std::vector<Date> dates(ctx.dates.begin() + static_cast<std::ptrdiff_t>(s), ctx.dates.end());

  ModelRun run;
  run.signals = lstm_predict_signals(trained.model, test_windows, scaler, prior, dates);
  run.returns = ctx.test_returns;
  run.y_pred = run.signals.values;
  run.y_true.resize(ctx.test_returns.size());
  for (std::size_t i = 0; i < ctx.test_returns.size(); ++i) {
    run.y_true[i] = ctx.test_returns.values[i] > 0.0 ? 1 : 0;
  }
  run.model_doc = json{{"schema_version", kSchemaVersion},
                       {"model", "lstm"},
                       {"arch",
                        {{"lag", arch.lag},
                         {"hidden1", arch.hidden1},
                         {"hidden2", arch.hidden2},
                         {"dense", arch.dense}}},
                       {"scaler", {{"min", scaler.min}, {"max", scaler.max}}},
                       {"epoch_losses", trained.epoch_losses},
                       {"weights", to_json(trained.model)}};
  return run;
}

ModelRun run_model(const std::string& name, const BacktestContext& ctx) {
  if (name == "arma_garch") return run_arma_garch(ctx);
  if (name == "cross_signal") return run_cross_signal(ctx);
  if (name == "lstm") return run_lstm(ctx);
  if (name == "rf") return run_rf(ctx);
  if (name == "svr") return run_svr(ctx);
  if (name == "knn") return run_knn(ctx);
  throw std::invalid_argument("unknown model: " + name);
}

void write_model_bundle(const fs::path& dir, const std::string& name, const ModelRun& run,
                        const std::vector<std::string>& strategies) {
  fs::create_directories(dir);

  json perf = json::object();
  for (const std::string& strategy : strategies) {
    const StrategyKind kind = strategy_from_string(strategy);
    const EquityCurve curve = simulate_prealigned(run.signals, run.returns, kind);
    write_equity_csv((dir / ("equity_" + strategy + ".csv")).string(), curve);
    perf[strategy] = to_json(performance(curve));
  }
  write_json((dir / "performance.json").string(),
             json{{"schema_version", kSchemaVersion}, {"model", name}, {"strategies", perf}});

  const ConfusionMatrix cm = confusion(run.y_true, run.y_pred, 1);
  const ClassReport report = classification_report(cm);
  const ExtremeAccuracy extremes =
      extreme_accuracy(run.returns.values, run.y_true, run.y_pred);
  json evaluation = {{"schema_version", kSchemaVersion},
                     {"model", name},
                     {"accuracy", report.accuracy},
                     {"confusion", to_json(cm)},
                     {"classification_report", to_json(report)},
                     {"extreme_accuracy", to_json(extremes)}};
  if (run.importances) evaluation["importances"] = to_json(*run.importances);
  write_json((dir / "evaluation.json").string(), evaluation);

  write_json((dir / "model.json").string(), run.model_doc);
}

// Benchmark bundle: hold through the whole test window.
void write_baseline_bundle(const fs::path& dir, const BacktestContext& ctx) {
  fs::create_directories(dir);
  SignalSeries ones;
  ones.dates = ctx.test_returns.dates;
  ones.values.assign(ctx.test_returns.size(), 1);
  const EquityCurve curve =
      simulate_prealigned(ones, ctx.test_returns, StrategyKind::buy_and_hold);
  write_equity_csv((dir / "equity_buy_and_hold.csv").string(), curve);
  json perf = json::object();
  perf["buy_and_hold"] = to_json(performance(curve));
  write_json((dir / "performance.json").string(), json{{"schema_version", kSchemaVersion},
                                                       {"model", "baseline"},
                                                       {"strategies", perf}});
}

// Optional pre-training random search; results land in the model directory
// and the winning parameters feed the final fit.
void run_search(const RunConfig& cfg, BacktestContext& ctx,
                const std::vector<std::string>& models) {
  if (cfg.search.empty() || cfg.search.is_null()) return;
  if (!cfg.search.is_object()) throw std::runtime_error("config: search must be an object");
  const std::string family_name = cfg.search.at("family").get<std::string>();
  const ModelFamily family = family_from_string(family_name);
  if (std::find(models.begin(), models.end(), family_name) == models.end()) return;

  SearchSpace space;
  if (cfg.search.contains("budget")) space.budget = cfg.search.at("budget").get<std::size_t>();
  if (cfg.search.contains("folds")) space.folds = cfg.search.at("folds").get<std::size_t>();
  for (const auto& [name, values] : cfg.search.at("candidates").items()) {
    space.candidates[name] = values.get<std::vector<double>>();
  }
  space.scoring = family == ModelFamily::svr ? SearchScoring::mse : SearchScoring::accuracy;
  space.seed = derive_seed(cfg.seed, "search");

  const LabeledFrame& train = family == ModelFamily::svr ? ctx.reg_train : ctx.sig_train;
  const SearchResult result = random_search(family, space, train);
  ctx.tuned[family_name] = result.best_params;

  const fs::path dir = fs::path(cfg.out) / family_name;
  fs::create_directories(dir);
  json doc = {{"schema_version", kSchemaVersion},
              {"model", family_name},
              {"scoring", family == ModelFamily::svr ? "mse" : "accuracy"}};
  doc.update(to_json(result));
  write_json((dir / "search.json").string(), doc);
}

int cmd_backtest(const RunConfig& cfg) {
  PriceSeries series = load_source(cfg.source);
  BacktestContext ctx = make_context(std::move(series), cfg);
  const std::vector<std::string> models = selected_models(cfg);
  run_search(cfg, ctx, models);

  const fs::path out(cfg.out);
  fs::create_directories(out);

  // Each model's pipeline is sequential and writes only its own directory;
  // a failure is recorded and the remaining models still run.
  json status = json::object();
  std::size_t ok_count = 0;
  for (const std::string& name : models) {
    try {
      const ModelRun run = run_model(name, ctx);
      write_model_bundle(out / name, name, run, cfg.strategies);
      status[name] = json{{"ok", true}};
      ++ok_count;
      std::printf("backtest: %s done\n", name.c_str());
    } catch (const std::exception& e) {
      status[name] = json{{"ok", false}, {"error", e.what()}};
      std::fprintf(stderr, "backtest: %s failed: %s\n", name.c_str(), e.what());
    }
  }
  write_baseline_bundle(out / "baseline", ctx);

  write_json((out / "run_summary.json").string(), json{{"schema_version", kSchemaVersion},
                                                       {"command", "backtest"},
                                                       {"source", cfg.source},
                                                       {"model", cfg.model},
                                                       {"split", cfg.split},
                                                       {"seed", cfg.seed},
                                                       {"models", status}});
  return ok_count > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// cv

// Fit the scaler on the fold's training rows only; test rows reuse the same
// affine map.
LabeledFrame apply_scale(const ScalerInfo& info, LabeledFrame frame) {
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const ColumnScale& scale = info.columns.at(frame.feature_names[c]);
    for (double& value : frame.features[c]) value = scale.apply(value);
  }
  frame.scaling = info;
  return frame;
}

std::pair<LabeledFrame, ScalerInfo> scale_train(const LabeledFrame& train) {
  auto [scaled, same] = minmax_scale(train, train, train.feature_names);
  (void)same;
  return {scaled, *scaled.scaling};
}

// Per-model fold trainers. Each returns a TrainFn whose PredictFn emits one
// {0,1} code per test row; run_cv scores them against the direction labels.
TrainFn make_cv_trainer(const std::string& name, const PriceSeries& series,
                        std::uint64_t seed) {
  const std::vector<Date> dates = series.dates();
  const std::vector<double> closes = series.closes();
  std::map<Date, std::size_t> index_by_date;
  for (std::size_t i = 0; i < dates.size(); ++i) index_by_date[dates[i]] = i;

  if (name == "rf") {
    RfConfig config;
    config.seed = derive_seed(seed, "rf");
    return [config](const LabeledFrame& train) -> PredictFn {
      auto [scaled, info] = scale_train(train);
      const Forest forest = rf_train(scaled, config);
      return [forest, info](const LabeledFrame& test) {
        return rf_predict(forest, apply_scale(info, test)).signals.values;
      };
    };
  }
  if (name == "knn") {
    const KnnConfig config;
    return [config](const LabeledFrame& train) -> PredictFn {
      auto [scaled, info] = scale_train(train);
      return [scaled, info, config](const LabeledFrame& test) {
        return knn_predict(scaled, apply_scale(info, test), config).signals.values;
      };
    };
  }
  if (name == "svr") {
    // Regression targets (next closes) replace the direction labels for the
    // fit; predictions convert back to direction codes against prior closes.
    return [index_by_date, closes](const LabeledFrame& train) -> PredictFn {
      LabeledFrame reg = train;
      for (std::size_t i = 0; i < reg.rows(); ++i) {
        reg.labels[i] = closes.at(index_by_date.at(reg.dates[i]) + 1);
      }
      auto [scaled, info] = scale_train(reg);
      const SvrModel model = svr_train(scaled, SvrConfig{});
      return [model, info, index_by_date, closes](const LabeledFrame& test) {
        std::vector<double> prior(test.rows());
        for (std::size_t i = 0; i < test.rows(); ++i) {
          prior[i] = closes.at(index_by_date.at(test.dates[i]));
        }
        return svr_predict_signals(model, apply_scale(info, test), prior).values;
      };
    };
  }
  if (name == "arma_garch") {
    return [](const LabeledFrame& train) -> PredictFn {
      std::vector<double> returns = train.next_returns;
      const GarchFit fit = fit_arma_garch(returns);
      return [fit](const LabeledFrame& test) {
        ReturnSeries window{test.dates, test.next_returns};
        const SignalSeries sig = forecast_signal(fit, window);
        std::vector<int> pred(sig.values.size());
        for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = sig.values[i] > 0 ? 1 : 0;
        return pred;
      };
    };
  }
  if (name == "cross_signal") {
    // Untrained: look the standing crossover state up by date; rows before
    // the slow window has filled read as low.
    const SignalSeries cs = cross_signal(series);
    std::map<Date, int> by_date;
    for (std::size_t i = 0; i < cs.size(); ++i) by_date[cs.dates[i]] = cs.values[i];
    return [by_date](const LabeledFrame&) -> PredictFn {
      return [by_date](const LabeledFrame& test) {
        std::vector<int> pred(test.rows(), 0);
        for (std::size_t i = 0; i < test.rows(); ++i) {
          const auto it = by_date.find(test.dates[i]);
          if (it != by_date.end()) pred[i] = it->second;
        }
        return pred;
      };
    };
  }
  if (name == "lstm") {
    const LstmArch arch;
    return [index_by_date, closes, dates, seed, arch](const LabeledFrame& train) -> PredictFn {
      // Training closes, fold-local scaler.
      std::vector<std::size_t> rows(train.rows());
      for (std::size_t i = 0; i < train.rows(); ++i) {
        rows[i] = index_by_date.at(train.dates[i]);
      }
      double lo = closes[rows[0]], hi = closes[rows[0]];
      for (std::size_t r : rows) {
        lo = std::min(lo, closes[r]);
        hi = std::max(hi, closes[r]);
      }
      const ColumnScale scaler{lo, hi};
      std::vector<double> scaled(closes.size());
      for (std::size_t i = 0; i < closes.size(); ++i) scaled[i] = scaler.apply(closes[i]);

      // Windows per contiguous run of training rows; folds in the interior
      // leave a gap the windows must not straddle.
      WindowDataset dataset;
      dataset.lag = arch.lag;
      std::vector<Eigen::VectorXd> windows;
      std::vector<double> targets;
      std::size_t run_begin = 0;
      auto harvest = [&](std::size_t begin, std::size_t end) {  // rows [begin, end)
        const std::size_t lo_row = rows[begin];
        const std::size_t hi_row = rows[end - 1];
        if (hi_row - lo_row + 1 <= static_cast<std::size_t>(arch.lag)) return;
        const WindowDataset part = build_windows(
            std::span(scaled).subspan(lo_row, hi_row - lo_row + 2), arch.lag);
        for (Eigen::Index w = 0; w < part.count(); ++w) {
          windows.push_back(part.inputs.row(w).transpose());
          targets.push_back(part.targets(w));
        }
      };
      for (std::size_t i = 1; i <= rows.size(); ++i) {
        if (i == rows.size() || rows[i] != rows[i - 1] + 1) {
          harvest(run_begin, i);
          run_begin = i;
        }
      }
      if (windows.empty()) throw std::runtime_error("lstm: no full training window in fold");
      dataset.inputs.resize(static_cast<Eigen::Index>(windows.size()), arch.lag);
      dataset.targets.resize(static_cast<Eigen::Index>(windows.size()));
      for (std::size_t w = 0; w < windows.size(); ++w) {
        dataset.inputs.row(static_cast<Eigen::Index>(w)) = windows[w].transpose();
        dataset.targets(static_cast<Eigen::Index>(w)) = targets[w];
      }

      TrainConfig config;
      config.seed = derive_seed(seed, "lstm");
      const TrainResult trained = lstm_train(dataset, config, arch);
      const LstmModel model = trained.model;

      return [model, scaler, scaled, index_by_date, closes, arch](const LabeledFrame& test) {
        std::vector<int> pred(test.rows(), 0);
        for (std::size_t i = 0; i < test.rows(); ++i) {
          const std::size_t row = index_by_date.at(test.dates[i]);
          if (row + 1 < static_cast<std::size_t>(arch.lag)) continue;  // no full window yet
          Eigen::VectorXd window(arch.lag);
          for (Eigen::Index j = 0; j < arch.lag; ++j) {
            window(j) = scaled[row + 1 - static_cast<std::size_t>(arch.lag) +
                               static_cast<std::size_t>(j)];
          }
          const double price = scaler.invert(forward(model, window));
          pred[i] = price > closes[row] ? 1 : 0;
        }
        return pred;
      };
    };
  }
  throw std::invalid_argument("unknown model: " + name);
}

std::string csv_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : "";
}

int cmd_cv(const RunConfig& cfg) {
  PriceSeries series = load_source(cfg.source);
  const LabeledFrame frame = build_features(series, {}, LabelKind::signal);
  const std::vector<std::string> models = selected_models(cfg);

  const fs::path dir = fs::path(cfg.out) / "cv";
  fs::create_directories(dir);

  std::string table = "model,fold,accuracy,sharpe_only_long,sharpe_long_short\n";
  json combined = {{"schema_version", kSchemaVersion}, {"k", cfg.k}};
  json per_model = json::object();
  std::size_t ok_count = 0;
  for (const std::string& name : models) {
    try {
      const TrainFn fit = make_cv_trainer(name, series, cfg.seed);
      const CvResult result = run_cv(fit, frame, cfg.k);
      for (const CvFold& fold : result.folds) {
        table += name + "," + std::to_string(fold.fold) + ",";
        table += (fold.ok ? format_double(fold.accuracy) : "") + ",";
        table += csv_cell(fold.sharpe_only_long) + "," + csv_cell(fold.sharpe_long_short) + "\n";
      }
      table += name + ",mean," + format_double(result.mean_accuracy) + ",";
      table += csv_cell(result.mean_sharpe_only_long) + "," +
               csv_cell(result.mean_sharpe_long_short) + "\n";
      per_model[name] = to_json(result);
      ++ok_count;
      std::printf("cv: %s mean accuracy %.4f\n", name.c_str(), result.mean_accuracy);
    } catch (const std::exception& e) {
      per_model[name] = json{{"error", e.what()}};
      std::fprintf(stderr, "cv: %s failed: %s\n", name.c_str(), e.what());
    }
  }
  combined["models"] = per_model;
  write_text((dir / "cv_table.csv").string(), table);
  write_json((dir / "cv_table.json").string(), combined);
  return ok_count > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report

// date,value rows out of an equity CSV (date,position,daily_return,cumulative).
std::string plot_from_equity(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::string out = "date,value\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t first = line.find(',');
    const std::size_t last = line.rfind(',');
    out += line.substr(0, first) + "," + line.substr(last + 1) + "\n";
  }
  return out;
}

int cmd_report(const RunConfig& cfg) {
  const fs::path out(cfg.out);
  const std::vector<std::string> models = selected_models(cfg);

  std::vector<std::pair<std::string, json>> found;
  std::vector<std::string> missing;
  for (const std::string& name : models) {
    const fs::path path = out / name / "performance.json";
    std::ifstream in(path);
    if (!in) {
      missing.push_back(path.string());
      continue;
    }
    found.emplace_back(name, json::parse(in));
  }
  for (const std::string& path : missing) {
    std::fprintf(stderr, "report: missing input %s\n", path.c_str());
  }
  if (found.empty()) {
    std::fprintf(stderr, "report: no backtest outputs under %s\n", out.string().c_str());
    return 1;
  }

  const fs::path dir = out / "report";
  const fs::path plots = dir / "plots";
  fs::create_directories(plots);

  // Consolidated strategy x model metric rows, benchmark last.
  std::string table = "strategy,model,sharpe_ratio,profit_factor\n";
  auto metric_row = [&table](const std::string& strategy, const std::string& model,
                             const json& perf) {
    const json& sharpe = perf.at("sharpe_ratio");
    const json& pf = perf.at("profit_factor");
    table += strategy + "," + model + ",";
    table += (sharpe.is_null() ? "" : format_double(sharpe.get<double>())) + ",";
    if (perf.at("profit_factor_infinite").get<bool>()) {
      table += "inf";
    } else {
      table += pf.is_null() ? "" : format_double(pf.get<double>());
    }
    table += "\n";
  };
  for (const auto& [name, doc] : found) {
    const json& strategies = doc.at("strategies");
    for (const std::string& strategy : {std::string("only_long"), std::string("long_short")}) {
      if (strategies.contains(strategy)) metric_row(strategy, name, strategies.at(strategy));
    }
  }

  // The buy-and-hold benchmark row: the dedicated baseline bundle when
  // present, otherwise the first model carrying the strategy.
  json baseline;
  {
    const fs::path path = out / "baseline" / "performance.json";
    std::ifstream in(path);
    if (in) {
      baseline = json::parse(in).at("strategies").at("buy_and_hold");
      metric_row("buy_and_hold", "baseline", baseline);
    } else {
      for (const auto& [name, doc] : found) {
        if (doc.at("strategies").contains("buy_and_hold")) {
          metric_row("buy_and_hold", name, doc.at("strategies").at("buy_and_hold"));
          break;
        }
      }
    }
  }
  write_text((dir / "table.csv").string(), table);

  // Plot-ready series: equity curves and monthly-return bars per bundle.
  std::vector<std::pair<std::string, json>> bundles = found;
  if (!baseline.is_null()) bundles.emplace_back("baseline", json{{"strategies", json::object()}});
  for (const auto& [name, doc] : found) {
    for (const auto& [strategy, perf] : doc.at("strategies").items()) {
      const fs::path equity = out / name / ("equity_" + strategy + ".csv");
      if (fs::exists(equity)) {
        write_text((plots / ("equity_" + name + "_" + strategy + ".csv")).string(),
                   plot_from_equity(equity));
      }
      std::string monthly = "date,value\n";
      for (const auto& [month, value] : perf.at("monthly_returns").items()) {
        monthly += month + "," + format_double(value.get<double>()) + "\n";
      }
      write_text((plots / ("monthly_" + name + "_" + strategy + ".csv")).string(), monthly);
    }
  }
  if (!baseline.is_null()) {
    const fs::path equity = out / "baseline" / "equity_buy_and_hold.csv";
    if (fs::exists(equity)) {
      write_text((plots / "equity_baseline_buy_and_hold.csv").string(),
                 plot_from_equity(equity));
    }
    std::string monthly = "date,value\n";
    for (const auto& [month, value] : baseline.at("monthly_returns").items()) {
      monthly += month + "," + format_double(value.get<double>()) + "\n";
    }
    write_text((plots / "monthly_baseline_buy_and_hold.csv").string(), monthly);
  }

  std::printf("report: %zu model(s) -> %s\n", found.size(), (dir / "table.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oilsignal: indicator features, signal models, and strategy backtests "
               "over daily OHLCV data"};
  app.require_subcommand(1);

  std::string config_path, source, model, out;
  double split = 0.8;
  std::uint64_t seed = 1;
  std::size_t k = 5;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--source", source, "OHLCV CSV path or http(s) URL");
    cmd->add_option("--model", model, "arma_garch|cross_signal|lstm|rf|svr|knn|all");
    cmd->add_option("--seed", seed, "master seed (component streams derive from it)");
    cmd->add_option("--out", out, "output directory (default $OILSIGNAL_OUT or oilsignal_out)");
    cmd->add_option("--split", split, "training fraction in (0,1)");
    cmd->add_option("--k", k, "cross-validation fold count");
    return cmd;
  };
  add_common(app.add_subcommand("ingest", "Fetch and clean a source into prices.csv"));
  add_common(app.add_subcommand("backtest", "Train, predict, and evaluate selected models"));
  add_common(app.add_subcommand("cv", "Ordered k-fold cross-validation scores"));
  add_common(app.add_subcommand("report", "Consolidate backtest outputs into tables and plots"));

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    RunConfig cfg;
    cfg.out = default_out();
    if (cmd->count("--config") > 0) apply_config_file(config_path, cfg);
    if (cmd->count("--source") > 0) cfg.source = source;
    if (cmd->count("--model") > 0) cfg.model = model;
    if (cmd->count("--seed") > 0) cfg.seed = seed;
    if (cmd->count("--out") > 0) cfg.out = out;
    if (cmd->count("--split") > 0) cfg.split = split;
    if (cmd->count("--k") > 0) cfg.k = k;
    validate(cfg);

    const std::string name = cmd->get_name();
    if (name == "ingest") return cmd_ingest(cfg);
    if (name == "backtest") return cmd_backtest(cfg);
    if (name == "cv") return cmd_cv(cfg);
    return cmd_report(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "oilsignal: %s\n", e.what());
    return 1;
  }
}
