#include "oilsignal/knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oilsignal {

KnnPrediction knn_predict(const LabeledFrame& train, const LabeledFrame& test,
                          const KnnConfig& config) {
  if (train.rows() == 0) throw std::invalid_argument("knn_predict: empty training set");
  if (config.k < 1) throw std::invalid_argument("knn_predict: k must be >= 1");
  if (config.k > train.rows()) {
    throw std::invalid_argument("knn_predict: k exceeds training size");
  }
  if (train.cols() != test.cols()) {
    throw std::invalid_argument("knn_predict: feature count mismatch");
  }

  const std::size_t n = train.rows();
  const std::size_t d = train.cols();

  KnnPrediction out;
  out.signals.alphabet = SignalAlphabet::zero_one;
  out.signals.dates = test.dates;
  out.signals.values.reserve(test.rows());
  out.scores.reserve(test.rows());

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t q = 0; q < test.rows(); ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        sum += std::fabs(test.features[c][q] - train.features[c][i]);
      }
      dist[i] = {sum, i};
    }
    // (distance, index) ordering keeps equal-distance choices deterministic.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(config.k),
                      dist.end());

    std::array<double, 2> score{0.0, 0.0};
    const bool exact = dist.front().first == 0.0;
    for (std::size_t j = 0; j < config.k; ++j) {
      const auto& [dd, idx] = dist[j];
      const int label = train.labels[idx] > 0.5 ? 1 : 0;
      if (exact) {
        if (dd == 0.0) score[static_cast<std::size_t>(label)] += 1.0;
      } else {
        score[static_cast<std::size_t>(label)] += 1.0 / dd;
      }
    }
    out.scores.push_back(score);
    out.signals.values.push_back(score[1] > score[0] ? 1 : 0);
  }
  return out;
}

}  // namespace oilsignal
