#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oilsignal/market_data.hpp"

namespace oilsignal {

// Gate weights act on the concatenation [input; previous hidden].
struct LstmLayer {
  Eigen::MatrixXd w_i, w_f, w_g, w_o;  // (hidden, input + hidden)
  Eigen::VectorXd b_i, b_f, b_g, b_o;  // (hidden)
  Eigen::Index input_size = 0;
  Eigen::Index hidden_size = 0;
};

struct DenseLayer {
  Eigen::MatrixXd w;  // (out, in)
  Eigen::VectorXd b;  // (out); identity activation
};

struct LstmArch {
  Eigen::Index lag = 39;
  Eigen::Index hidden1 = 128;
  Eigen::Index hidden2 = 64;
  Eigen::Index dense = 25;
};

// Stacked regressor: LSTM(hidden1) over the full window, LSTM(hidden2)
// reduced to its final hidden state, then two identity dense layers down to
// one output.
struct LstmModel {
  LstmLayer layer1;
  LstmLayer layer2;
  DenseLayer dense1;
  DenseLayer dense2;
};

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases except the
// forget gates at +1.
LstmModel lstm_init(const LstmArch& arch, std::uint64_t seed);

// Flat views over every parameter tensor in a stable order; gradients reuse
// the model shape, so the same accessor serves both.
struct TensorView {
  std::string name;
  double* data = nullptr;
  Eigen::Index size = 0;
};
std::vector<TensorView> tensor_views(LstmModel& model);

LstmModel zeros_like(const LstmModel& model);

struct TrainConfig {
  int epochs = 5;
  int batch_size = 1;  // samples per update; the paper's setting is 1
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
};

struct WindowDataset {
  Eigen::MatrixXd inputs;   // (count, lag), one window per row
  Eigen::VectorXd targets;  // (count)
  Eigen::Index lag = 0;

  Eigen::Index count() const { return inputs.rows(); }
};

// window_i = values[i, i+lag), target_i = values[i+lag]; count = n - lag.
WindowDataset build_windows(std::span<const double> scaled_values, Eigen::Index lag = 39);

// Per-timestep activations kept for exact backpropagation through time.
struct LayerCache {
  std::vector<Eigen::VectorXd> inputs;  // x_t (input part only)
  std::vector<Eigen::VectorXd> i, f, g, o, c, tanh_c, h;
};

struct ForwardCache {
  LayerCache l1, l2;
  Eigen::VectorXd dense1_in;   // final hidden of layer 2
  Eigen::VectorXd dense1_out;  // (dense)
  double prediction = 0.0;
};

double forward(const LstmModel& model, const Eigen::VectorXd& window, ForwardCache& cache);
double forward(const LstmModel& model, const Eigen::VectorXd& window);

// Gradients of the squared error (prediction - target)^2 with respect to
// every parameter, exact through the full window.
LstmModel backward(const LstmModel& model, const ForwardCache& cache, double target);

struct TrainResult {
  LstmModel model;
  std::vector<double> epoch_losses;  // mean squared error per epoch
};

// Adam with per-sample updates in chronological order. Throws on a
// non-finite loss, naming the epoch and sample.
TrainResult lstm_train(const WindowDataset& dataset, const TrainConfig& config,
                       const LstmArch& arch = {});

// Scaled predictions -> prices via the inverse scaler -> log return against
// the prior actual close -> {0,1} signal (non-positive -> 0).
SignalSeries lstm_predict_signals(const LstmModel& model, const WindowDataset& test_windows,
                                  const ColumnScale& scaler, std::span<const double> prior_closes,
                                  const std::vector<Date>& dates);

// Raw price predictions for each window (inverse-scaled).
std::vector<double> lstm_predict_prices(const LstmModel& model, const WindowDataset& windows,
                                        const ColumnScale& scaler);

}  // namespace oilsignal
