#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

enum class ModelFamily { knn, rf, svr };

ModelFamily family_from_string(const std::string& name);
std::string to_string(ModelFamily family);

enum class SearchScoring {
  accuracy,  // classification; higher is better
  mse        // regression; lower is better
};

struct SearchSpace {
  // Candidate values per hyperparameter name. Recognized names:
  //   knn: k, leaf_size
  //   rf:  n_trees, max_features, max_depth, min_samples_split, min_samples_leaf
  //   svr: C, epsilon, gamma
  std::map<std::string, std::vector<double>> candidates;
  std::size_t budget = 20;
  std::size_t folds = 5;
  SearchScoring scoring = SearchScoring::accuracy;
  std::uint64_t seed = 0;
};

struct SearchTrial {
  std::size_t index = 0;
  std::map<std::string, double> params;
  double score = 0.0;
  bool ok = false;
  std::string error;
};

struct SearchResult {
  std::map<std::string, double> best_params;
  double best_score = 0.0;
  std::vector<SearchTrial> trials;
  // Row ranges [begin, end) of the ordered folds every trial was scored on;
  // all indices refer to the training frame handed in.
  std::vector<std::pair<std::size_t, std::size_t>> fold_test_ranges;
};

// Uniformly sample `budget` configurations (trial seeds = seed + index),
// score each with ordered k-fold cross-validation on the given frame only,
// and return the best one with the full trial log. Throws when every trial
// fails.
SearchResult random_search(ModelFamily family, const SearchSpace& space,
                           const LabeledFrame& train);

}  // namespace oilsignal
