#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oilsignal/backtest.hpp"
#include "oilsignal/evaluation.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/rng.hpp"
#include "oilsignal/stats.hpp"

using namespace oilsignal;

namespace {

LabeledFrame numbered_frame(std::size_t rows) {
  LabeledFrame frame;
  frame.feature_names = {"x"};
  frame.features.assign(1, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    frame.features[0][r] = static_cast<double>(r);
    frame.dates.push_back(Date{2018, 1, 1}.plus_days(static_cast<long>(r)));
    frame.labels.push_back(static_cast<double>(r % 2));
    frame.next_returns.push_back(r % 2 == 0 ? -0.01 : 0.01);
  }
  return frame;
}

}  // namespace

TEST_CASE("accuracy counts matches") {
  const std::vector<int> t = {1, 0, 1, 1, 0};
  const std::vector<int> p = {1, 0, 0, 1, 1};
  CHECK(accuracy(t, p) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_THROWS_AS(accuracy(t, std::vector<int>{1, 0}), std::invalid_argument);
}

TEST_CASE("confusion matrix sorts predictions into the four cells") {
  const std::vector<int> t = {1, 1, 1, 0, 0, 0, 1, 0};
  const std::vector<int> p = {1, 0, 1, 1, 0, 0, 1, 1};
  const ConfusionMatrix cm = confusion(t, p, 1);
  CHECK(cm.tp == 3);
  CHECK(cm.fn == 1);
  CHECK(cm.fp == 2);
  CHECK(cm.tn == 2);
  CHECK(cm.total() == 8);

  // Signal overload with the directional alphabet: the high code is +1.
  SignalSeries st, sp;
  st.alphabet = sp.alphabet = SignalAlphabet::directional;
  st.values = {1, -1, 1};
  sp.values = {1, 1, -1};
  for (int i = 0; i < 3; ++i) {
    st.dates.push_back(Date{2020, 1, 1}.plus_days(i));
    sp.dates.push_back(st.dates.back());
  }
  const ConfusionMatrix cm2 = confusion(st, sp);
  CHECK(cm2.tp == 1);
  CHECK(cm2.fp == 1);
  CHECK(cm2.fn == 1);
  CHECK(cm2.tn == 0);
}

TEST_CASE("classification report: worked example and the down-class swap") {
  ConfusionMatrix cm;
  cm.tp = 8;
  cm.fp = 2;
  cm.fn = 4;
  cm.tn = 6;
  const ClassReport rep = classification_report(cm);
  CHECK(rep.up.precision == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rep.up.recall == doctest::Approx(8.0 / 12.0).epsilon(1e-12));
  CHECK(rep.up.f1 == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(rep.up.support == 12);
  CHECK(!rep.up.zero_division);

  // Down row: tn plays tp, fn plays fp.
  CHECK(rep.down.precision == doctest::Approx(6.0 / 10.0).epsilon(1e-12));
  CHECK(rep.down.recall == doctest::Approx(6.0 / 8.0).epsilon(1e-12));
  CHECK(rep.down.f1 == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
  CHECK(rep.down.support == 8);

  CHECK(rep.accuracy == doctest::Approx(14.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("classification report flags zero-division instead of dividing") {
  ConfusionMatrix cm;  // nothing predicted positive, nothing actually positive
  cm.tn = 5;
  const ClassReport rep = classification_report(cm);
  CHECK(rep.up.zero_division);
  CHECK(rep.up.precision == 0.0);
  CHECK(rep.up.recall == 0.0);
  CHECK(rep.up.f1 == 0.0);
  CHECK(rep.down.precision == doctest::Approx(1.0));
  CHECK(rep.accuracy == doctest::Approx(1.0));
}

TEST_CASE("ordered kfold carves contiguous blocks with the remainder at the end") {
  const LabeledFrame frame = numbered_frame(23);
  const std::vector<KfoldSplit> splits = ordered_kfold(frame, 4);  // 23 = 4*5 + 3
  REQUIRE(splits.size() == 4);

  for (std::size_t f = 0; f < 4; ++f) {
    const KfoldSplit& split = splits[f];
    CHECK(split.fold == f);
    CHECK(split.test_begin == f * 5);
    CHECK(split.test_end == (f == 3 ? 23 : f * 5 + 5));
    CHECK(split.test.rows() == split.test_end - split.test_begin);
    CHECK(split.train.rows() == 23 - split.test.rows());

    // Train rows are everything else, in their original order.
    std::vector<double> expect;
    for (std::size_t r = 0; r < 23; ++r) {
      if (r < split.test_begin || r >= split.test_end) expect.push_back(static_cast<double>(r));
    }
    CHECK(split.train.features[0] == expect);
    CHECK(split.test.features[0][0] == static_cast<double>(split.test_begin));
  }

  CHECK_THROWS_AS(ordered_kfold(frame, 1), std::invalid_argument);
  CHECK_THROWS_AS(ordered_kfold(numbered_frame(7), 4), std::invalid_argument);  // n < 2k
}

TEST_CASE("run_cv scores folds and averages the completed ones") {
  const LabeledFrame frame = numbered_frame(40);

  // A rule that alternates with the row parity: even row index -> 0, odd -> 1,
  // which matches the labels exactly.
  const TrainFn perfect = [](const LabeledFrame&) {
    return [](const LabeledFrame& test) {
      std::vector<int> out(test.rows());
      for (std::size_t r = 0; r < test.rows(); ++r) {
        out[r] = static_cast<int>(test.features[0][r]) % 2;
      }
      return out;
    };
  };
  const CvResult result = run_cv(perfect, frame, 5);
  REQUIRE(result.folds.size() == 5);
  CHECK(!result.any_failed);
  CHECK(result.mean_accuracy == doctest::Approx(1.0).epsilon(1e-12));
  for (const CvFold& fold : result.folds) {
    CHECK(fold.ok);
    CHECK(fold.accuracy == doctest::Approx(1.0));
  }

  // Mean accuracy is the plain average of fold accuracies.
  const TrainFn constant = [](const LabeledFrame&) {
    return [](const LabeledFrame& test) { return std::vector<int>(test.rows(), 1); };
  };
  const CvResult ones = run_cv(constant, frame, 5);
  double mean = 0.0;
  for (const CvFold& fold : ones.folds) mean += fold.accuracy;
  mean /= 5.0;
  CHECK(ones.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));

  // The sharpe columns follow the prediction-driven strategy returns.
  const CvFold& f0 = ones.folds[0];
  std::vector<double> fold_returns;
  for (std::size_t r = 0; r < 8; ++r) fold_returns.push_back(frame.next_returns[r]);
  CHECK(f0.sharpe_only_long.has_value());
  CHECK(*f0.sharpe_only_long == doctest::Approx(sharpe(fold_returns)).epsilon(1e-9));
}

TEST_CASE("run_cv records fold failures without aborting") {
  const LabeledFrame frame = numbered_frame(30);
  int calls = 0;
  const TrainFn flaky = [&calls](const LabeledFrame&) -> PredictFn {
    if (++calls == 2) throw std::runtime_error("synthetic failure");
    return [](const LabeledFrame& test) { return std::vector<int>(test.rows(), 0); };
  };
  const CvResult result = run_cv(flaky, frame, 5);
  CHECK(result.any_failed);
  std::size_t ok_count = 0;
  for (const CvFold& fold : result.folds) {
    if (fold.ok) {
      ++ok_count;
    } else {
      CHECK(fold.error == "synthetic failure");
    }
  }
  CHECK(ok_count == 4);
}

TEST_CASE("permutation importance credits the informative feature") {
  Rng rng(derive_seed(31, "importance"));
  const std::size_t rows = 400;
  LabeledFrame test;
  test.feature_names = {"signal_feature", "noise"};
  test.features.assign(2, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    test.features[0][r] = rng.uniform();
    test.features[1][r] = rng.uniform();
    test.dates.push_back(Date{2019, 1, 1}.plus_days(static_cast<long>(r)));
    test.labels.push_back(test.features[0][r] > 0.5 ? 1.0 : 0.0);
    test.next_returns.push_back(0.0);
  }
  const PredictFn threshold = [](const LabeledFrame& frame) {
    std::vector<int> out(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r) out[r] = frame.features[0][r] > 0.5 ? 1 : 0;
    return out;
  };

  const ImportanceResult result = permutation_importance(threshold, test, 5, 99);
  CHECK(result.baseline_accuracy == doctest::Approx(1.0));
  CHECK(!result.uniform_fallback);
  CHECK(result.mean_drops.at("signal_feature") > 0.3);
  CHECK(result.mean_drops.at("noise") == doctest::Approx(0.0));
  CHECK(result.shares.at("signal_feature") == doctest::Approx(1.0));
  CHECK(result.shares.at("noise") == doctest::Approx(0.0));

  double share_sum = 0.0;
  for (const auto& [name, share] : result.shares) share_sum += share;
  CHECK(share_sum == doctest::Approx(1.0).epsilon(1e-12));

  // Deterministic in the seed.
  const ImportanceResult again = permutation_importance(threshold, test, 5, 99);
  CHECK(result.mean_drops == again.mean_drops);
}

TEST_CASE("permutation importance falls back to uniform shares when nothing matters") {
  const LabeledFrame test = numbered_frame(50);
  const PredictFn blind = [](const LabeledFrame& frame) {
    return std::vector<int>(frame.rows(), 1);
  };
  const ImportanceResult result = permutation_importance(blind, test, 3, 7);
  CHECK(result.uniform_fallback);
  CHECK(result.shares.at("x") == doctest::Approx(1.0));  // single feature
}

TEST_CASE("extreme buckets hold the right tails and report exact accuracies") {
  // 100 returns: strictly increasing, so quantiles are unambiguous.
  std::vector<double> returns(100);
  std::vector<int> y_true(100), y_pred(100);
  for (int i = 0; i < 100; ++i) {
    returns[i] = -0.05 + 0.001 * i;
    y_true[i] = returns[i] > 0 ? 1 : 0;
    y_pred[i] = i % 2;
  }
  const std::vector<double> levels = {0.9};
  const ExtremeAccuracy result = extreme_accuracy(returns, y_true, y_pred, levels);
  CHECK(result.count_total == 100);
  CHECK(result.accuracy_regular == doctest::Approx(accuracy(y_true, y_pred)).epsilon(1e-12));
  REQUIRE(result.buckets.size() == 1);

  const ExtremeBucket& bucket = result.buckets[0];
  CHECK(bucket.level == doctest::Approx(0.9));
  CHECK(bucket.lower == doctest::Approx(quantile(returns, 0.05)).epsilon(1e-12));
  CHECK(bucket.upper == doctest::Approx(quantile(returns, 0.95)).epsilon(1e-12));

  std::size_t count = 0, correct = 0;
  for (int i = 0; i < 100; ++i) {
    if (returns[i] < bucket.lower || returns[i] > bucket.upper) {
      ++count;
      if (y_true[i] == y_pred[i]) ++correct;
    }
  }
  CHECK(bucket.count == count);
  REQUIRE(bucket.accuracy.has_value());
  CHECK(*bucket.accuracy ==
        doctest::Approx(static_cast<double>(correct) / count).epsilon(1e-12));

  // Default levels are the 5% and 1% buckets, nested by construction.
  const ExtremeAccuracy defaults = extreme_accuracy(returns, y_true, y_pred);
  REQUIRE(defaults.buckets.size() == 2);
  CHECK(defaults.buckets[0].level == doctest::Approx(0.95));
  CHECK(defaults.buckets[1].level == doctest::Approx(0.99));
  CHECK(defaults.buckets[1].count <= defaults.buckets[0].count);
  CHECK(defaults.buckets[0].lower >= defaults.buckets[1].lower);
  CHECK(defaults.buckets[0].upper <= defaults.buckets[1].upper);
}

TEST_CASE("an empty bucket reports no accuracy") {
  std::vector<double> returns = {0.01, 0.01, 0.01, 0.01};  // constant: nothing is extreme
  std::vector<int> ones(4, 1);
  const ExtremeAccuracy result = extreme_accuracy(returns, ones, ones);
  for (const ExtremeBucket& bucket : result.buckets) {
    CHECK(bucket.count == 0);
    CHECK(!bucket.accuracy.has_value());
  }
}
