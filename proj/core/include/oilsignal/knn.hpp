#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

struct KnnConfig {
  std::size_t k = 5;
  // Index-structure hint kept for config compatibility; the exact brute-force
  // scan ignores it.
  std::size_t leaf_size = 30;
};

struct KnnPrediction {
  SignalSeries signals;
  // Summed neighbor weights per class {0, 1} for each query row.
  std::vector<std::array<double, 2>> scores;
};

// Manhattan-distance k-nearest-neighbour vote with inverse-distance weights.
// Zero-distance neighbors (exact feature matches) decide alone with equal
// weight. Weight ties resolve to class 0. Training features are expected on
// a common [0,1] scale.
KnnPrediction knn_predict(const LabeledFrame& train, const LabeledFrame& test,
                          const KnnConfig& config = {});

}  // namespace oilsignal
