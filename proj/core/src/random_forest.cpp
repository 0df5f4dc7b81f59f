#include "oilsignal/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oilsignal/rng.hpp"

namespace oilsignal {

double entropy_bits(std::size_t count0, std::size_t count1) {
  const std::size_t total = count0 + count1;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : {count0, count1}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

struct TreeBuilder {
  const LabeledFrame& frame;
  const RfConfig& config;
  Rng& rng;
  DecisionTree tree;

  // rows: indices into the bootstrap sample's source frame (duplicates allowed).
  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t r : rows) counts[frame.labels[r] > 0.5 ? 1 : 0]++;

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[static_cast<std::size_t>(node_index)].counts = counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    if (pure || depth >= config.max_depth || rows.size() < config.min_samples_split) {
      return node_index;
    }

    const SplitChoice split = best_split(rows, counts);
    if (!split.found) return node_index;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t r : rows) {
      if (frame.features[split.feature][r] <= split.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = grow(std::move(left_rows), depth + 1);
    const int right = grow(std::move(right_rows), depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return node_index;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows,
                         const std::array<std::size_t, 2>& counts) {
    // Sample max_features distinct feature indices.
    std::vector<std::size_t> feature_pool(frame.cols());
    for (std::size_t i = 0; i < feature_pool.size(); ++i) feature_pool[i] = i;
    const std::size_t n_pick = std::min(config.max_features, feature_pool.size());
    for (std::size_t i = 0; i < n_pick; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(feature_pool.size() - i) - 1));
      std::swap(feature_pool[i], feature_pool[j]);
    }

    const double parent_entropy = entropy_bits(counts[0], counts[1]);
    const double total = static_cast<double>(rows.size());

    SplitChoice best;
    std::vector<std::pair<double, int>> ordered;  // (value, label)
    for (std::size_t pick = 0; pick < n_pick; ++pick) {
      const std::size_t f = feature_pool[pick];
      ordered.clear();
      ordered.reserve(rows.size());
      for (std::size_t r : rows) {
        ordered.emplace_back(frame.features[f][r], frame.labels[r] > 0.5 ? 1 : 0);
      }
      std::sort(ordered.begin(), ordered.end());

      std::array<std::size_t, 2> left{0, 0};
      std::array<std::size_t, 2> right = counts;
      for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        const auto cls = static_cast<std::size_t>(ordered[i].second);
        ++left[cls];
        --right[cls];
        if (ordered[i].first == ordered[i + 1].first) continue;  // not a boundary
        const std::size_t left_n = i + 1;
        const std::size_t right_n = ordered.size() - left_n;
        if (left_n < config.min_samples_leaf || right_n < config.min_samples_leaf) continue;
        const double threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
        const double gain = parent_entropy -
                            (static_cast<double>(left_n) / total) * entropy_bits(left[0], left[1]) -
                            (static_cast<double>(right_n) / total) * entropy_bits(right[0], right[1]);
        if (gain <= 0.0) continue;
        const bool better =
            gain > best.gain || (gain == best.gain && best.found && threshold < best.threshold);
        if (!best.found || better) {
          best.found = true;
          best.feature = f;
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }
    return best;
  }
};

}  // namespace

Forest rf_train(const LabeledFrame& train, const RfConfig& config) {
  if (train.rows() < 2) throw std::invalid_argument("rf_train: need at least 2 rows");
  if (config.max_features < 1 || config.max_features > train.cols()) {
    throw std::invalid_argument("rf_train: max_features outside [1, feature count]");
  }
  if (config.max_depth < 1) throw std::invalid_argument("rf_train: max_depth must be >= 1");

  Forest forest;
  forest.config = config;
  forest.feature_names = train.feature_names;
  forest.trees.reserve(config.n_trees);

  const std::size_t n = train.rows();
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, "tree#" + std::to_string(t)));
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = rng.index(n);
    TreeBuilder builder{train, config, rng, {}};
    builder.grow(std::move(rows), 0);
    forest.trees.push_back(std::move(builder.tree));
  }
  return forest;
}

int tree_predict(const DecisionTree& tree, std::span<const double> row) {
  std::size_t node = 0;
  while (!tree.nodes[node].is_leaf()) {
    const TreeNode& nd = tree.nodes[node];
    node = static_cast<std::size_t>(
        row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
  }
  const auto& counts = tree.nodes[node].counts;
  return counts[1] > counts[0] ? 1 : 0;
}

RfPrediction rf_predict(const Forest& forest, const LabeledFrame& test) {
  if (forest.trees.empty()) throw std::invalid_argument("rf_predict: empty forest");
  RfPrediction out;
  out.signals.alphabet = SignalAlphabet::zero_one;
  out.signals.dates = test.dates;
  out.signals.values.reserve(test.rows());
  out.vote_fraction.reserve(test.rows());

  std::vector<double> row(test.cols());
  for (std::size_t r = 0; r < test.rows(); ++r) {
    for (std::size_t c = 0; c < test.cols(); ++c) row[c] = test.features[c][r];
    std::size_t up_votes = 0;
    for (const DecisionTree& tree : forest.trees) {
      up_votes += static_cast<std::size_t>(tree_predict(tree, row));
    }
    const double fraction =
        static_cast<double>(up_votes) / static_cast<double>(forest.trees.size());
    out.vote_fraction.push_back(fraction);
    out.signals.values.push_back(2 * up_votes > forest.trees.size() ? 1 : 0);
  }
  return out;
}

}  // namespace oilsignal
