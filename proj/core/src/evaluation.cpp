#include "oilsignal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oilsignal/backtest.hpp"
#include "oilsignal/rng.hpp"
#include "oilsignal/stats.hpp"

namespace oilsignal {

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw std::invalid_argument("accuracy: length mismatch or empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

ConfusionMatrix confusion(const SignalSeries& y_true, const SignalSeries& y_pred) {
  if (y_true.alphabet != y_pred.alphabet) {
    throw std::invalid_argument("confusion: signal alphabets differ");
  }
  y_true.validate();
  y_pred.validate();
  return confusion(std::span(y_true.values), std::span(y_pred.values), y_true.high_code());
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int high_code) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual_up = y_true[i] == high_code;
    const bool predicted_up = y_pred[i] == high_code;
    if (actual_up && predicted_up) ++cm.tp;
    if (!actual_up && predicted_up) ++cm.fp;
    if (actual_up && !predicted_up) ++cm.fn;
    if (!actual_up && !predicted_up) ++cm.tn;
  }
  return cm;
}

namespace {

ClassMetrics metrics_from(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t support) {
  ClassMetrics m;
  m.support = support;
  const double tp_d = static_cast<double>(tp);
  if (tp + fp > 0) {
    m.precision = tp_d / static_cast<double>(tp + fp);
  } else {
    m.zero_division = true;
  }
  if (tp + fn > 0) {
    m.recall = tp_d / static_cast<double>(tp + fn);
  } else {
    m.zero_division = true;
  }
  if (tp + fp + fn > 0) {
    m.f1 = tp_d / (tp_d + 0.5 * static_cast<double>(fp + fn));
  } else {
    m.zero_division = true;
  }
  return m;
}

}  // namespace

ClassReport classification_report(const ConfusionMatrix& cm) {
  ClassReport report;
  report.up = metrics_from(cm.tp, cm.fp, cm.fn, cm.tp + cm.fn);
  // For the down class, "positive" means actual/predicted 0.
  report.down = metrics_from(cm.tn, cm.fn, cm.fp, cm.tn + cm.fp);
  const std::size_t total = cm.total();
  report.accuracy =
      total > 0 ? static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total) : 0.0;
  return report;
}

ImportanceResult permutation_importance(const PredictFn& predict, const LabeledFrame& test,
                                        std::size_t repetitions, std::uint64_t seed) {
  if (test.rows() < 2) throw std::invalid_argument("permutation_importance: need >= 2 rows");
  if (repetitions < 1) throw std::invalid_argument("permutation_importance: need >= 1 repetition");

  std::vector<int> labels(test.rows());
  for (std::size_t i = 0; i < test.rows(); ++i) labels[i] = test.labels[i] > 0.5 ? 1 : 0;

  ImportanceResult out;
  const std::vector<int> base_pred = predict(test);
  out.baseline_accuracy = accuracy(labels, base_pred);

  double total_drop = 0.0;
  for (std::size_t c = 0; c < test.cols(); ++c) {
    const std::string& name = test.feature_names[c];
    double drop_sum = 0.0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      Rng rng(derive_seed(seed, name + "#" + std::to_string(rep)));
      LabeledFrame shuffled = test;
      rng.shuffle(shuffled.features[c]);
      const std::vector<int> pred = predict(shuffled);
      drop_sum += out.baseline_accuracy - accuracy(labels, pred);
    }
    const double mean_drop = std::max(0.0, drop_sum / static_cast<double>(repetitions));
    out.mean_drops[name] = mean_drop;
    total_drop += mean_drop;
  }

  if (total_drop > 0.0) {
    for (const auto& [name, drop] : out.mean_drops) out.shares[name] = drop / total_drop;
  } else {
    out.uniform_fallback = true;
    const double uniform = 1.0 / static_cast<double>(test.cols());
    for (const auto& entry : out.mean_drops) out.shares[entry.first] = uniform;
  }
  return out;
}

std::vector<KfoldSplit> ordered_kfold(const LabeledFrame& frame, std::size_t k) {
  const std::size_t n = frame.rows();
  if (k < 2) throw std::invalid_argument("ordered_kfold: k must be >= 2");
  if (n < 2 * k) throw std::invalid_argument("ordered_kfold: too few rows for k folds");
  const std::size_t block = n / k;

  std::vector<KfoldSplit> splits;
  splits.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    KfoldSplit s;
    s.fold = i;
    s.test_begin = i * block;
    s.test_end = (i + 1 == k) ? n : (i + 1) * block;  // remainder joins the last block
    s.test = frame.slice(s.test_begin, s.test_end);

    const LabeledFrame before = frame.slice(0, s.test_begin);
    const LabeledFrame after = frame.slice(s.test_end, n);
    LabeledFrame train = before;
    train.dates.insert(train.dates.end(), after.dates.begin(), after.dates.end());
    for (std::size_t c = 0; c < train.features.size(); ++c) {
      train.features[c].insert(train.features[c].end(), after.features[c].begin(),
                               after.features[c].end());
    }
    train.labels.insert(train.labels.end(), after.labels.begin(), after.labels.end());
    train.next_returns.insert(train.next_returns.end(), after.next_returns.begin(),
                              after.next_returns.end());
    s.train = std::move(train);
    splits.push_back(std::move(s));
  }
  return splits;
}

CvResult run_cv(const TrainFn& fit, const LabeledFrame& frame, std::size_t k) {
  const std::vector<KfoldSplit> splits = ordered_kfold(frame, k);
  CvResult result;
  double acc_sum = 0.0, ol_sum = 0.0, ls_sum = 0.0;
  std::size_t ok_count = 0, ol_count = 0, ls_count = 0;

  for (const KfoldSplit& split : splits) {
    CvFold fold;
    fold.fold = split.fold;
    try {
      const PredictFn predict = fit(split.train);
      const std::vector<int> pred = predict(split.test);
      if (pred.size() != split.test.rows()) {
        throw std::runtime_error("prediction count mismatch");
      }
      std::vector<int> labels(split.test.rows());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = split.test.labels[i] > 0.5 ? 1 : 0;
      }
      fold.accuracy = accuracy(labels, pred);

      std::vector<double> only_long(pred.size()), long_short(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i) {
        only_long[i] = pred[i] * split.test.next_returns[i];
        long_short[i] = (2 * pred[i] - 1) * split.test.next_returns[i];
      }
      try {
        fold.sharpe_only_long = sharpe(std::span<const double>(only_long));
      } catch (const std::exception&) {
      }
      try {
        fold.sharpe_long_short = sharpe(std::span<const double>(long_short));
      } catch (const std::exception&) {
      }
      fold.ok = true;
    } catch (const std::exception& e) {
      fold.ok = false;
      fold.error = e.what();
      result.any_failed = true;
    }
    if (fold.ok) {
      acc_sum += fold.accuracy;
      ++ok_count;
      if (fold.sharpe_only_long) {
        ol_sum += *fold.sharpe_only_long;
        ++ol_count;
      }
      if (fold.sharpe_long_short) {
        ls_sum += *fold.sharpe_long_short;
        ++ls_count;
      }
    }
    result.folds.push_back(std::move(fold));
  }
  if (ok_count > 0) result.mean_accuracy = acc_sum / static_cast<double>(ok_count);
  if (ol_count > 0) result.mean_sharpe_only_long = ol_sum / static_cast<double>(ol_count);
  if (ls_count > 0) result.mean_sharpe_long_short = ls_sum / static_cast<double>(ls_count);
  return result;
}

ExtremeAccuracy extreme_accuracy(std::span<const double> test_returns,
                                 std::span<const int> y_true, std::span<const int> y_pred,
                                 std::span<const double> levels) {
  if (test_returns.size() != y_true.size() || y_true.size() != y_pred.size()) {
    throw std::invalid_argument("extreme_accuracy: length mismatch");
  }
  if (test_returns.empty()) throw std::invalid_argument("extreme_accuracy: empty input");

  ExtremeAccuracy out;
  out.count_total = test_returns.size();
  out.accuracy_regular = accuracy(y_true, y_pred);

  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("extreme_accuracy: level must lie in (0,1)");
    }
    ExtremeBucket bucket;
    bucket.level = level;
    bucket.lower = quantile(test_returns, (1.0 - level) / 2.0);
    bucket.upper = quantile(test_returns, (1.0 + level) / 2.0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_returns.size(); ++i) {
      if (test_returns[i] < bucket.lower || test_returns[i] > bucket.upper) {
        ++bucket.count;
        hits += y_true[i] == y_pred[i];
      }
    }
    if (bucket.count > 0) {
      bucket.accuracy = static_cast<double>(hits) / static_cast<double>(bucket.count);
    }
    out.buckets.push_back(bucket);
  }
  return out;
}

ExtremeAccuracy extreme_accuracy(std::span<const double> test_returns,
                                 std::span<const int> y_true, std::span<const int> y_pred) {
  const double default_levels[] = {0.95, 0.99};
  return extreme_accuracy(test_returns, y_true, y_pred, std::span(default_levels));
}

}  // namespace oilsignal
