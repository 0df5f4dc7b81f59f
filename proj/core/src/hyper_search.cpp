#include "oilsignal/hyper_search.hpp"

#include <cmath>
#include <stdexcept>

#include "oilsignal/evaluation.hpp"
#include "oilsignal/knn.hpp"
#include "oilsignal/random_forest.hpp"
#include "oilsignal/rng.hpp"
#include "oilsignal/svr.hpp"

namespace oilsignal {

ModelFamily family_from_string(const std::string& name) {
  if (name == "knn") return ModelFamily::knn;
  if (name == "rf") return ModelFamily::rf;
  if (name == "svr") return ModelFamily::svr;
  throw std::invalid_argument("unknown model family: " + name);
}

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::knn: return "knn";
    case ModelFamily::rf: return "rf";
    case ModelFamily::svr: return "svr";
  }
  return "unknown";
}

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& name,
                 double fallback) {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

// Mean accuracy (classification families) over the ordered folds.
double score_classifier(const TrainFn& fit, const LabeledFrame& frame, std::size_t folds) {
  const CvResult cv = run_cv(fit, frame, folds);
  if (cv.any_failed) throw std::runtime_error("fold failure during scoring");
  return cv.mean_accuracy;
}

// Mean squared error of raw regression predictions over the ordered folds.
double score_regressor(const SvrConfig& config, const LabeledFrame& frame, std::size_t folds) {
  double total_se = 0.0;
  std::size_t total_n = 0;
  for (const KfoldSplit& split : ordered_kfold(frame, folds)) {
    const SvrModel model = svr_train(split.train, config);
    const std::vector<double> pred = svr_predict(model, split.test);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double e = pred[i] - split.test.labels[i];
      total_se += e * e;
      ++total_n;
    }
  }
  return total_se / static_cast<double>(total_n);
}

double score_trial(ModelFamily family, const std::map<std::string, double>& params,
                   const SearchSpace& space, const LabeledFrame& train, std::size_t trial) {
  switch (family) {
    case ModelFamily::knn: {
      KnnConfig config;
      config.k = static_cast<std::size_t>(get_param(params, "k", 5));
      config.leaf_size = static_cast<std::size_t>(get_param(params, "leaf_size", 30));
      const TrainFn fit = [config](const LabeledFrame& tr) -> PredictFn {
        return [config, tr](const LabeledFrame& te) { return knn_predict(tr, te, config).signals.values; };
      };
      return score_classifier(fit, train, space.folds);
    }
    case ModelFamily::rf: {
      RfConfig config;
      config.n_trees = static_cast<std::size_t>(get_param(params, "n_trees", 169));
      config.max_features = static_cast<std::size_t>(get_param(params, "max_features", 2));
      config.max_depth = static_cast<std::size_t>(get_param(params, "max_depth", 4));
      config.min_samples_split =
          static_cast<std::size_t>(get_param(params, "min_samples_split", 49));
      config.min_samples_leaf =
          static_cast<std::size_t>(get_param(params, "min_samples_leaf", 1));
      config.seed = derive_seed(space.seed, "rf_trial#" + std::to_string(trial));
      const TrainFn fit = [config](const LabeledFrame& tr) -> PredictFn {
        const Forest forest = rf_train(tr, config);
        return [forest](const LabeledFrame& te) { return rf_predict(forest, te).signals.values; };
      };
      return score_classifier(fit, train, space.folds);
    }
    case ModelFamily::svr: {
      SvrConfig config;
      config.C = get_param(params, "C", 19.0);
      config.epsilon = get_param(params, "epsilon", 22.4);
      const double gamma = get_param(params, "gamma", 0.0);
      if (gamma > 0.0) config.gamma = gamma;
      return score_regressor(config, train, space.folds);
    }
  }
  throw std::logic_error("unreachable family");
}

}  // namespace

SearchResult random_search(ModelFamily family, const SearchSpace& space,
                           const LabeledFrame& train) {
  if (space.budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
  if (space.candidates.empty()) {
    throw std::invalid_argument("random_search: empty candidate space");
  }
  for (const auto& [name, values] : space.candidates) {
    if (values.empty()) {
      throw std::invalid_argument("random_search: no candidates for '" + name + "'");
    }
  }

  SearchResult result;
  for (const KfoldSplit& split : ordered_kfold(train, space.folds)) {
    result.fold_test_ranges.emplace_back(split.test_begin, split.test_end);
  }

  const bool higher_better = space.scoring == SearchScoring::accuracy;
  bool have_best = false;

  for (std::size_t t = 0; t < space.budget; ++t) {
    Rng rng(space.seed + t);
    SearchTrial trial;
    trial.index = t;
    for (const auto& [name, values] : space.candidates) {
      trial.params[name] = values[rng.index(values.size())];
    }
    try {
      trial.score = score_trial(family, trial.params, space, train, t);
      trial.ok = true;
      const bool better = !have_best || (higher_better ? trial.score > result.best_score
                                                       : trial.score < result.best_score);
      if (better) {
        have_best = true;
        result.best_score = trial.score;
        result.best_params = trial.params;
      }
    } catch (const std::exception& e) {
      trial.ok = false;
      trial.error = e.what();
    }
    result.trials.push_back(std::move(trial));
  }
  if (!have_best) throw std::runtime_error("random_search: every trial failed");
  return result;
}

}  // namespace oilsignal
