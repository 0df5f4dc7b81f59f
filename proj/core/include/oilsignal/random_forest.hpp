#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

struct RfConfig {
  std::size_t n_trees = 169;
  std::size_t max_features = 2;  // features sampled per node, without replacement
  std::size_t max_depth = 4;
  std::size_t min_samples_split = 49;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

// feature < 0 marks a leaf. Internal nodes route x[feature] <= threshold to
// `left`, otherwise to `right`. Every node keeps its class counts.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<std::size_t, 2> counts{0, 0};

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct Forest {
  RfConfig config;
  std::vector<std::string> feature_names;
  std::vector<DecisionTree> trees;
};

struct RfPrediction {
  SignalSeries signals;
  std::vector<double> vote_fraction;  // share of trees voting class 1
};

// Shannon entropy in bits of a two-class count pair.
double entropy_bits(std::size_t count0, std::size_t count1);

// Bagged trees: bootstrap rows, per-node feature subsampling, exhaustive
// midpoint thresholds under the information-gain criterion. Gain ties break
// toward the smaller threshold. Deterministic for a fixed seed.
Forest rf_train(const LabeledFrame& train, const RfConfig& config = {});

int tree_predict(const DecisionTree& tree, std::span<const double> row);

// Hard majority vote; ties resolve to class 0.
RfPrediction rf_predict(const Forest& forest, const LabeledFrame& test);

}  // namespace oilsignal
