#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oilsignal/lstm.hpp"
#include "oilsignal/market_data.hpp"
#include "oilsignal/rng.hpp"

using namespace oilsignal;

namespace {

LstmArch tiny_arch() {
  LstmArch arch;
  arch.lag = 4;
  arch.hidden1 = 5;
  arch.hidden2 = 3;
  arch.dense = 2;
  return arch;
}

}  // namespace

TEST_CASE("windows slide over the series with one-step targets") {
  const std::vector<double> v = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const WindowDataset data = build_windows(v, 3);
  REQUIRE(data.count() == 4);
  CHECK(data.lag == 3);
  CHECK(data.inputs(0, 0) == doctest::Approx(0.0));
  CHECK(data.inputs(0, 2) == doctest::Approx(0.2));
  CHECK(data.targets(0) == doctest::Approx(0.3));
  CHECK(data.inputs(3, 0) == doctest::Approx(0.3));
  CHECK(data.targets(3) == doctest::Approx(0.6));
}

TEST_CASE("initialization bounds weights and sets forget bias to one") {
  const LstmArch arch = tiny_arch();
  LstmModel model = lstm_init(arch, 77);

  CHECK(model.layer1.input_size == 1);
  CHECK(model.layer1.hidden_size == arch.hidden1);
  CHECK(model.layer2.input_size == arch.hidden1);
  CHECK(model.layer2.hidden_size == arch.hidden2);
  CHECK(model.dense1.w.rows() == arch.dense);
  CHECK(model.dense1.w.cols() == arch.hidden2);
  CHECK(model.dense2.w.rows() == 1);
  CHECK(model.dense2.w.cols() == arch.dense);

  CHECK((model.layer1.b_f.array() == 1.0).all());
  CHECK((model.layer2.b_f.array() == 1.0).all());
  CHECK((model.layer1.b_i.array() == 0.0).all());
  CHECK((model.dense1.b.array() == 0.0).all());

  const double bound1 = 1.0 / std::sqrt(static_cast<double>(1 + arch.hidden1));
  CHECK(model.layer1.w_i.array().abs().maxCoeff() <= bound1);
  CHECK(model.layer1.w_i.array().abs().maxCoeff() > 0.0);

  // Deterministic in the seed, different across seeds.
  LstmModel again = lstm_init(arch, 77);
  CHECK(model.layer1.w_g == again.layer1.w_g);
  LstmModel other = lstm_init(arch, 78);
  CHECK(model.layer1.w_g != other.layer1.w_g);
}

TEST_CASE("tensor views expose every parameter exactly once") {
  const LstmArch arch = tiny_arch();
  LstmModel model = lstm_init(arch, 5);
  const std::vector<TensorView> views = tensor_views(model);

  Eigen::Index total = 0;
  for (const TensorView& view : views) {
    REQUIRE(view.data != nullptr);
    REQUIRE(view.size > 0);
    REQUIRE(!view.name.empty());
    total += view.size;
  }
  const Eigen::Index in1 = 1 + arch.hidden1, in2 = arch.hidden1 + arch.hidden2;
  const Eigen::Index expect = 4 * (arch.hidden1 * in1 + arch.hidden1) +
                              4 * (arch.hidden2 * in2 + arch.hidden2) +
                              arch.dense * arch.hidden2 + arch.dense + arch.dense + 1;
  CHECK(total == expect);

  // Views alias the model: writing through one changes the forward pass.
  Eigen::VectorXd window(arch.lag);
  window << 0.1, 0.2, 0.3, 0.4;
  const double before = forward(model, window);
  *views[0].data += 0.5;
  CHECK(forward(model, window) != before);
}

TEST_CASE("zeros_like matches shapes with zero values") {
  LstmModel model = lstm_init(tiny_arch(), 6);
  LstmModel zero = zeros_like(model);
  const std::vector<TensorView> mv = tensor_views(model);
  const std::vector<TensorView> zv = tensor_views(zero);
  REQUIRE(mv.size() == zv.size());
  for (std::size_t i = 0; i < zv.size(); ++i) {
    REQUIRE(zv[i].size == mv[i].size);
    for (Eigen::Index j = 0; j < zv[i].size; ++j) REQUIRE(zv[i].data[j] == 0.0);
  }
}

TEST_CASE("forward pass is deterministic and cache matches the plain overload") {
  const LstmArch arch = tiny_arch();
  const LstmModel model = lstm_init(arch, 9);
  Eigen::VectorXd window(arch.lag);
  window << 0.4, 0.3, 0.2, 0.1;

  ForwardCache cache;
  const double with_cache = forward(model, window, cache);
  const double plain = forward(model, window);
  CHECK(with_cache == plain);
  CHECK(cache.prediction == with_cache);
  CHECK(cache.l1.h.size() == arch.lag);
  CHECK(cache.l2.h.size() == arch.lag);
  CHECK(cache.dense1_in.size() == arch.hidden2);
}

TEST_CASE("analytic gradients agree with central differences on a tiny net") {
  const LstmArch arch = tiny_arch();
  LstmModel model = lstm_init(arch, 31);
  Eigen::VectorXd window(arch.lag);
  window << 0.9, 0.1, 0.5, 0.3;
  const double target = 0.7;

  ForwardCache cache;
  forward(model, window, cache);
  LstmModel grad = backward(model, cache, target);

  const std::vector<TensorView> params = tensor_views(model);
  const std::vector<TensorView> grads = tensor_views(grad);
  const double h = 1e-6;
  double max_rel = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t].size; i += 3) {  // stride keeps it fast
      const double saved = params[t].data[i];
      params[t].data[i] = saved + h;
      const double up = forward(model, window) - target;
      params[t].data[i] = saved - h;
      const double down = forward(model, window) - target;
      params[t].data[i] = saved;
      const double numeric = (up * up - down * down) / (2.0 * h);
      const double denom = std::max(1e-8, std::fabs(numeric) + std::fabs(grads[t].data[i]));
      max_rel = std::max(max_rel, std::fabs(numeric - grads[t].data[i]) / denom);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("training lowers the loss on a learnable sequence") {
  std::vector<double> wave(160);
  for (std::size_t i = 0; i < wave.size(); ++i) {
    wave[i] = 0.5 + 0.4 * std::sin(0.3 * static_cast<double>(i));
  }
  const LstmArch arch = tiny_arch();
  const WindowDataset data = build_windows(wave, arch.lag);

  TrainConfig config;
  config.epochs = 4;
  config.seed = derive_seed(3, "lstm_unit");
  const TrainResult result = lstm_train(data, config, arch);
  REQUIRE(result.epoch_losses.size() == 4);
  CHECK(result.epoch_losses.back() < result.epoch_losses.front());
  CHECK(result.epoch_losses.back() < 0.01);

  // Deterministic end to end.
  const TrainResult again = lstm_train(data, config, arch);
  CHECK(result.epoch_losses == again.epoch_losses);
  Eigen::VectorXd probe = data.inputs.row(0).transpose();
  CHECK(forward(result.model, probe) == forward(again.model, probe));
}

TEST_CASE("price predictions invert the scaler and signals compare to prior closes") {
  // A model with no support from training still produces deterministic
  // outputs; drive the signal logic with a known scaler instead.
  const LstmArch arch = tiny_arch();
  const LstmModel model = lstm_init(arch, 12);

  std::vector<double> scaled = {0.1, 0.3, 0.5, 0.7, 0.2, 0.6, 0.4, 0.8};
  const WindowDataset windows = build_windows(scaled, arch.lag);
  ColumnScale scaler;
  scaler.min = 20.0;
  scaler.max = 120.0;

  const std::vector<double> prices = lstm_predict_prices(model, windows, scaler);
  REQUIRE(prices.size() == static_cast<std::size_t>(windows.count()));
  for (std::size_t i = 0; i < prices.size(); ++i) {
    Eigen::VectorXd window = windows.inputs.row(static_cast<Eigen::Index>(i)).transpose();
    const double scaled_pred = forward(model, window);
    REQUIRE(prices[i] == doctest::Approx(scaler.invert(scaled_pred)).epsilon(1e-12));
  }

  std::vector<double> prior(prices.size());
  std::vector<Date> dates(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    prior[i] = i % 2 == 0 ? prices[i] + 1.0 : prices[i] - 1.0;  // alternate direction
    dates[i] = Date{2022, 1, 3}.plus_days(static_cast<long>(i));
  }
  const SignalSeries signals = lstm_predict_signals(model, windows, scaler, prior, dates);
  REQUIRE(signals.size() == prices.size());
  CHECK(signals.alphabet == SignalAlphabet::zero_one);
  CHECK(signals.dates == dates);
  for (std::size_t i = 0; i < prices.size(); ++i) {
    REQUIRE(signals.values[i] == (prices[i] > prior[i] ? 1 : 0));
  }
}
