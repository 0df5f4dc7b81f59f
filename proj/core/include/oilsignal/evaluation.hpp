#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

// Class 1 ("up day") is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool zero_division = false;  // some denominator was 0; affected metrics report 0
};

struct ClassReport {
  ClassMetrics down;  // class 0 treated as positive
  ClassMetrics up;    // class 1 treated as positive
  double accuracy = 0.0;
};

struct ImportanceResult {
  double baseline_accuracy = 0.0;
  std::map<std::string, double> mean_drops;  // clipped at 0
  std::map<std::string, double> shares;      // normalized to sum 1
  bool uniform_fallback = false;             // all drops were 0
};

struct KfoldSplit {
  std::size_t fold = 0;
  std::size_t test_begin = 0;  // row range [test_begin, test_end)
  std::size_t test_end = 0;
  LabeledFrame train;  // all other blocks, concatenated in time order
  LabeledFrame test;
};

struct CvFold {
  std::size_t fold = 0;
  bool ok = false;
  std::string error;
  double accuracy = 0.0;
  std::optional<double> sharpe_only_long;
  std::optional<double> sharpe_long_short;
};

struct CvResult {
  std::vector<CvFold> folds;
  double mean_accuracy = 0.0;  // over completed folds
  std::optional<double> mean_sharpe_only_long;
  std::optional<double> mean_sharpe_long_short;
  bool any_failed = false;
};

struct ExtremeBucket {
  double level = 0.0;  // e.g. 0.95
  double lower = 0.0;  // empirical quantile at (1-level)/2
  double upper = 0.0;  // empirical quantile at (1+level)/2
  std::size_t count = 0;
  std::optional<double> accuracy;  // absent when the bucket is empty
};

struct ExtremeAccuracy {
  double accuracy_regular = 0.0;
  std::size_t count_total = 0;
  std::vector<ExtremeBucket> buckets;
};

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

ConfusionMatrix confusion(const SignalSeries& y_true, const SignalSeries& y_pred);
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int high_code = 1);

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = tp/(tp + (fp+fn)/2);
// the down-class row swaps the class roles.
ClassReport classification_report(const ConfusionMatrix& cm);

// Predicts one {0,1} signal per frame row.
using PredictFn = std::function<std::vector<int>(const LabeledFrame&)>;

// Shuffle one feature column at a time (seeded per feature and repetition),
// measure the accuracy drop against the unshuffled baseline, average over
// repetitions, clip at zero, and normalize to shares.
ImportanceResult permutation_importance(const PredictFn& predict, const LabeledFrame& test,
                                        std::size_t repetitions, std::uint64_t seed);

// Contiguous chronological blocks of floor(n/k) rows; the remainder extends
// the final block. Fold i tests on block i and trains on every other block,
// concatenated in time order.
std::vector<KfoldSplit> ordered_kfold(const LabeledFrame& frame, std::size_t k = 5);

// Fit on each fold's train rows, score on its test rows: accuracy plus the
// Sharpe ratio of the only-long and long-short strategies driven by the
// predictions. Fold failures are recorded; means cover completed folds.
using TrainFn = std::function<PredictFn(const LabeledFrame&)>;
CvResult run_cv(const TrainFn& fit, const LabeledFrame& frame, std::size_t k = 5);

// Bucket test days by how extreme the realized return is: for each level l,
// the bucket holds days outside the empirical [(1-l)/2, (1+l)/2] quantile
// band of the test returns. Accuracy is reported per bucket and overall.
ExtremeAccuracy extreme_accuracy(std::span<const double> test_returns,
                                 std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const double> levels);
ExtremeAccuracy extreme_accuracy(std::span<const double> test_returns,
                                 std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace oilsignal
