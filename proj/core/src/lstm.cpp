#include "oilsignal/lstm.hpp"

#include <cmath>
#include <stdexcept>

#include "oilsignal/rng.hpp"

namespace oilsignal {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

void init_layer(LstmLayer& layer, Eigen::Index input, Eigen::Index hidden, Rng& rng) {
  layer.input_size = input;
  layer.hidden_size = hidden;
  const Eigen::Index cols = input + hidden;
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  for (Eigen::MatrixXd* w : {&layer.w_i, &layer.w_f, &layer.w_g, &layer.w_o}) {
    w->resize(hidden, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < hidden; ++r) (*w)(r, c) = rng.uniform(-bound, bound);
    }
  }
  layer.b_i = Eigen::VectorXd::Zero(hidden);
  layer.b_f = Eigen::VectorXd::Ones(hidden);  // +1 stabilizes early training
  layer.b_g = Eigen::VectorXd::Zero(hidden);
  layer.b_o = Eigen::VectorXd::Zero(hidden);
}

void init_dense(DenseLayer& layer, Eigen::Index input, Eigen::Index output, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(input));
  layer.w.resize(output, input);
  for (Eigen::Index c = 0; c < input; ++c) {
    for (Eigen::Index r = 0; r < output; ++r) layer.w(r, c) = rng.uniform(-bound, bound);
  }
  layer.b = Eigen::VectorXd::Zero(output);
}

// One LSTM pass over a sequence of input vectors; fills the cache.
void run_layer(const LstmLayer& layer, const std::vector<Eigen::VectorXd>& sequence,
               LayerCache& cache) {
  const std::size_t steps = sequence.size();
  cache.inputs = sequence;
  cache.i.resize(steps);
  cache.f.resize(steps);
  cache.g.resize(steps);
  cache.o.resize(steps);
  cache.c.resize(steps);
  cache.tanh_c.resize(steps);
  cache.h.resize(steps);

  Eigen::VectorXd x(layer.input_size + layer.hidden_size);
  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(layer.hidden_size);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(layer.hidden_size);
  for (std::size_t t = 0; t < steps; ++t) {
    x.head(layer.input_size) = sequence[t];
    x.tail(layer.hidden_size) = h_prev;
    cache.i[t] = sigmoid(layer.w_i * x + layer.b_i);
    cache.f[t] = sigmoid(layer.w_f * x + layer.b_f);
    cache.g[t] = (layer.w_g * x + layer.b_g).array().tanh();
    cache.o[t] = sigmoid(layer.w_o * x + layer.b_o);
    cache.c[t] = cache.f[t].cwiseProduct(c_prev) + cache.i[t].cwiseProduct(cache.g[t]);
    cache.tanh_c[t] = cache.c[t].array().tanh();
    cache.h[t] = cache.o[t].cwiseProduct(cache.tanh_c[t]);
    h_prev = cache.h[t];
    c_prev = cache.c[t];
  }
}

// BPTT through one layer. d_h_seq holds the gradient flowing into h_t from
// above (may be empty vectors for steps without a contribution). Returns the
// gradient with respect to the layer's input sequence; accumulates parameter
// gradients into grad.
std::vector<Eigen::VectorXd> backprop_layer(const LstmLayer& layer, const LayerCache& cache,
                                            const std::vector<Eigen::VectorXd>& d_h_seq,
                                            LstmLayer& grad) {
  const std::size_t steps = cache.h.size();
  std::vector<Eigen::VectorXd> d_inputs(steps);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(layer.hidden_size);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(layer.hidden_size);
  Eigen::VectorXd x(layer.input_size + layer.hidden_size);

  for (std::size_t t = steps; t-- > 0;) {
    Eigen::VectorXd dh = dh_next;
    if (d_h_seq[t].size() > 0) dh += d_h_seq[t];

    const Eigen::VectorXd& i = cache.i[t];
    const Eigen::VectorXd& f = cache.f[t];
    const Eigen::VectorXd& g = cache.g[t];
    const Eigen::VectorXd& o = cache.o[t];
    const Eigen::VectorXd& tc = cache.tanh_c[t];
    const Eigen::VectorXd c_prev =
        t > 0 ? cache.c[t - 1] : Eigen::VectorXd::Zero(layer.hidden_size);
    const Eigen::VectorXd h_prev =
        t > 0 ? cache.h[t - 1] : Eigen::VectorXd::Zero(layer.hidden_size);

    const Eigen::VectorXd d_o = dh.cwiseProduct(tc);
    Eigen::VectorXd dc = dh.cwiseProduct(o).cwiseProduct(
                             (1.0 - tc.array().square()).matrix()) +
                         dc_next;
    const Eigen::VectorXd d_i = dc.cwiseProduct(g);
    const Eigen::VectorXd d_g = dc.cwiseProduct(i);
    const Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(f);

    const Eigen::VectorXd dz_i = d_i.cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
    const Eigen::VectorXd dz_f = d_f.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
    const Eigen::VectorXd dz_g = d_g.cwiseProduct((1.0 - g.array().square()).matrix());
    const Eigen::VectorXd dz_o = d_o.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

    x.head(layer.input_size) = cache.inputs[t];
    x.tail(layer.hidden_size) = h_prev;

    grad.w_i.noalias() += dz_i * x.transpose();
    grad.w_f.noalias() += dz_f * x.transpose();
    grad.w_g.noalias() += dz_g * x.transpose();
    grad.w_o.noalias() += dz_o * x.transpose();
    grad.b_i += dz_i;
    grad.b_f += dz_f;
    grad.b_g += dz_g;
    grad.b_o += dz_o;

    const Eigen::VectorXd dx = layer.w_i.transpose() * dz_i + layer.w_f.transpose() * dz_f +
                               layer.w_g.transpose() * dz_g + layer.w_o.transpose() * dz_o;
    d_inputs[t] = dx.head(layer.input_size);
    dh_next = dx.tail(layer.hidden_size);
  }
  return d_inputs;
}

}  // namespace

LstmModel lstm_init(const LstmArch& arch, std::uint64_t seed) {
  Rng rng(seed);
  LstmModel model;
  init_layer(model.layer1, 1, arch.hidden1, rng);
  init_layer(model.layer2, arch.hidden1, arch.hidden2, rng);
  init_dense(model.dense1, arch.hidden2, arch.dense, rng);
  init_dense(model.dense2, arch.dense, 1, rng);
  return model;
}

std::vector<TensorView> tensor_views(LstmModel& model) {
  std::vector<TensorView> views;
  auto add_layer = [&](const std::string& prefix, LstmLayer& layer) {
    views.push_back({prefix + ".w_i", layer.w_i.data(), layer.w_i.size()});
    views.push_back({prefix + ".w_f", layer.w_f.data(), layer.w_f.size()});
    views.push_back({prefix + ".w_g", layer.w_g.data(), layer.w_g.size()});
    views.push_back({prefix + ".w_o", layer.w_o.data(), layer.w_o.size()});
    views.push_back({prefix + ".b_i", layer.b_i.data(), layer.b_i.size()});
    views.push_back({prefix + ".b_f", layer.b_f.data(), layer.b_f.size()});
    views.push_back({prefix + ".b_g", layer.b_g.data(), layer.b_g.size()});
    views.push_back({prefix + ".b_o", layer.b_o.data(), layer.b_o.size()});
  };
  add_layer("lstm1", model.layer1);
  add_layer("lstm2", model.layer2);
  views.push_back({"dense1.w", model.dense1.w.data(), model.dense1.w.size()});
  views.push_back({"dense1.b", model.dense1.b.data(), model.dense1.b.size()});
  views.push_back({"dense2.w", model.dense2.w.data(), model.dense2.w.size()});
  views.push_back({"dense2.b", model.dense2.b.data(), model.dense2.b.size()});
  return views;
}

LstmModel zeros_like(const LstmModel& model) {
  LstmModel z = model;
  std::vector<TensorView> views = tensor_views(z);
  for (TensorView& v : views) {
    for (Eigen::Index i = 0; i < v.size; ++i) v.data[i] = 0.0;
  }
  return z;
}

WindowDataset build_windows(std::span<const double> scaled_values, Eigen::Index lag) {
  const Eigen::Index n = static_cast<Eigen::Index>(scaled_values.size());
  if (lag < 1) throw std::invalid_argument("build_windows: lag must be >= 1");
  if (n <= lag) throw std::invalid_argument("build_windows: need more values than the lag");
  WindowDataset ds;
  ds.lag = lag;
  ds.inputs.resize(n - lag, lag);
  ds.targets.resize(n - lag);
  for (Eigen::Index i = 0; i + lag < n; ++i) {
    for (Eigen::Index t = 0; t < lag; ++t) {
      ds.inputs(i, t) = scaled_values[static_cast<std::size_t>(i + t)];
    }
    ds.targets(i) = scaled_values[static_cast<std::size_t>(i + lag)];
  }
  return ds;
}

double forward(const LstmModel& model, const Eigen::VectorXd& window, ForwardCache& cache) {
  if (window.size() < 1) throw std::invalid_argument("forward: empty window");
  std::vector<Eigen::VectorXd> seq(static_cast<std::size_t>(window.size()));
  for (Eigen::Index t = 0; t < window.size(); ++t) {
    seq[static_cast<std::size_t>(t)] = Eigen::VectorXd::Constant(1, window(t));
  }
  run_layer(model.layer1, seq, cache.l1);
  run_layer(model.layer2, cache.l1.h, cache.l2);
  cache.dense1_in = cache.l2.h.back();
  cache.dense1_out = model.dense1.w * cache.dense1_in + model.dense1.b;
  cache.prediction = (model.dense2.w * cache.dense1_out + model.dense2.b)(0);
  return cache.prediction;
}

double forward(const LstmModel& model, const Eigen::VectorXd& window) {
  ForwardCache cache;
  return forward(model, window, cache);
}

LstmModel backward(const LstmModel& model, const ForwardCache& cache, double target) {
  LstmModel grad = zeros_like(model);
  const double d_pred = 2.0 * (cache.prediction - target);

  // dense2: y = w * dense1_out + b
  grad.dense2.w = d_pred * cache.dense1_out.transpose();
  grad.dense2.b = Eigen::VectorXd::Constant(1, d_pred);
  const Eigen::VectorXd d_dense1_out = model.dense2.w.transpose() * d_pred;

  grad.dense1.w = d_dense1_out * cache.dense1_in.transpose();
  grad.dense1.b = d_dense1_out;
  const Eigen::VectorXd d_h2_last = model.dense1.w.transpose() * d_dense1_out;

  const std::size_t steps = cache.l1.h.size();
  std::vector<Eigen::VectorXd> d_h2(steps);
  d_h2[steps - 1] = d_h2_last;
  const std::vector<Eigen::VectorXd> d_l1_h =
      backprop_layer(model.layer2, cache.l2, d_h2, grad.layer2);
  backprop_layer(model.layer1, cache.l1, d_l1_h, grad.layer1);
  return grad;
}

TrainResult lstm_train(const WindowDataset& dataset, const TrainConfig& config,
                       const LstmArch& arch) {
  if (dataset.count() == 0) throw std::invalid_argument("lstm_train: empty dataset");
  if (config.epochs < 1) throw std::invalid_argument("lstm_train: epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("lstm_train: learning rate must be positive");
  }
  if (dataset.lag != arch.lag) {
    throw std::invalid_argument("lstm_train: dataset lag does not match the architecture");
  }

  TrainResult result;
  result.model = lstm_init(arch, config.seed);
  LstmModel adam_m = zeros_like(result.model);
  LstmModel adam_v = zeros_like(result.model);

  std::vector<TensorView> params = tensor_views(result.model);
  std::vector<TensorView> m_views = tensor_views(adam_m);
  std::vector<TensorView> v_views = tensor_views(adam_v);

  ForwardCache cache;
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (Eigen::Index s = 0; s < dataset.count(); ++s) {
      const Eigen::VectorXd window = dataset.inputs.row(s).transpose();
      const double prediction = forward(result.model, window, cache);
      const double err = prediction - dataset.targets(s);
      const double loss = err * err;
      if (!std::isfinite(loss)) {
        throw std::runtime_error("lstm_train: non-finite loss at epoch " +
                                 std::to_string(epoch + 1) + ", sample " + std::to_string(s));
      }
      loss_sum += loss;

      LstmModel grad = backward(result.model, cache, dataset.targets(s));
      std::vector<TensorView> g_views = tensor_views(grad);

      ++step;
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t v = 0; v < params.size(); ++v) {
        double* p = params[v].data;
        double* m = m_views[v].data;
        double* vv = v_views[v].data;
        const double* g = g_views[v].data;
        for (Eigen::Index i = 0; i < params[v].size; ++i) {
          m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
          vv[i] = config.beta2 * vv[i] + (1.0 - config.beta2) * g[i] * g[i];
          const double m_hat = m[i] / bc1;
          const double v_hat = vv[i] / bc2;
          p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
        }
      }
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(dataset.count()));
  }
  return result;
}

std::vector<double> lstm_predict_prices(const LstmModel& model, const WindowDataset& windows,
                                        const ColumnScale& scaler) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(windows.count()));
  for (Eigen::Index s = 0; s < windows.count(); ++s) {
    const double scaled = forward(model, windows.inputs.row(s).transpose());
    out.push_back(scaler.invert(scaled));
  }
  return out;
}

SignalSeries lstm_predict_signals(const LstmModel& model, const WindowDataset& test_windows,
                                  const ColumnScale& scaler, std::span<const double> prior_closes,
                                  const std::vector<Date>& dates) {
  if (prior_closes.size() != static_cast<std::size_t>(test_windows.count()) ||
      dates.size() != prior_closes.size()) {
    throw std::invalid_argument("lstm_predict_signals: input lengths differ");
  }
  if (!(scaler.max > scaler.min)) {
    throw std::invalid_argument("lstm_predict_signals: scaler metadata missing or degenerate");
  }
  const std::vector<double> prices = lstm_predict_prices(model, test_windows, scaler);
  SignalSeries signals;
  signals.alphabet = SignalAlphabet::zero_one;
  signals.dates = dates;
  signals.values.reserve(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prior_closes[i] > 0.0)) {
      throw std::invalid_argument("lstm_predict_signals: non-positive prior close");
    }
    const double implied = std::log(prices[i] / prior_closes[i]);
    signals.values.push_back(std::isfinite(implied) && implied > 0.0 ? 1 : 0);
  }
  return signals;
}

}  // namespace oilsignal
