#pragma once

// Single-hidden-layer perceptron: sigmoid hidden and output units, one output
// per class, squared error, per-instance backpropagation with momentum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/random.hpp"
#include "emorec/scaling.hpp"
#include "emorec/svm.hpp"

namespace emorec {

struct MlpConfig {
  std::size_t hidden_units = 200;
  double learning_rate = 0.3;
  double momentum = 0.2;
  int epochs = 500;
  std::uint64_t seed = 1;
  double init_range = 0.05;

  bool operator==(const MlpConfig&) const = default;
};

inline void validate(const MlpConfig& c) {
  if (c.hidden_units < 1) fail(ErrorCode::InvalidConfig, "mlp: hidden_units must be >= 1");
  if (!(c.learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "mlp: learning_rate must be > 0");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0))
    fail(ErrorCode::InvalidConfig, "mlp: momentum must be in [0, 1)");
  if (c.epochs < 1) fail(ErrorCode::InvalidConfig, "mlp: epochs must be >= 1");
  if (!(c.init_range > 0.0)) fail(ErrorCode::InvalidConfig, "mlp: init_range must be > 0");
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Weights in one flat vector: W1 (hidden x inputs), b1, W2 (outputs x hidden), b2.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t inputs, std::size_t hidden, std::size_t outputs)
      : d_(inputs), h_(hidden), k_(outputs), params_(hidden * inputs + hidden + outputs * hidden + outputs, 0.0) {}

  std::size_t inputs() const { return d_; }
  std::size_t hidden() const { return h_; }
  std::size_t outputs() const { return k_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  void init_uniform(Rng& rng, double range) {
    for (double& p : params_) p = rng.uniform(-range, range);
  }

  /// Fills hidden and output activations.
  void forward(std::span<const double> x, std::span<double> hid, std::span<double> out) const {
    const double* w1 = params_.data();
    const double* b1 = w1 + h_ * d_;
    const double* w2 = b1 + h_;
    const double* b2 = w2 + k_ * h_;
    for (std::size_t j = 0; j < h_; ++j) {
      double z = b1[j];
      const double* row = w1 + j * d_;
      for (std::size_t i = 0; i < d_; ++i) z += row[i] * x[i];
      hid[j] = sigmoid(z);
    }
    for (std::size_t o = 0; o < k_; ++o) {
      double z = b2[o];
      const double* row = w2 + o * h_;
      for (std::size_t j = 0; j < h_; ++j) z += row[j] * hid[j];
      out[o] = sigmoid(z);
    }
  }

  std::vector<double> output(std::span<const double> x) const {
    std::vector<double> hid(h_), out(k_);
    forward(x, hid, out);
    return out;
  }

  /// 1/2 sum (o - t)^2 for one instance.
  double loss(std::span<const double> x, std::span<const double> target) const {
    const auto out = output(x);
    double l = 0.0;
    for (std::size_t o = 0; o < k_; ++o) l += 0.5 * (out[o] - target[o]) * (out[o] - target[o]);
    return l;
  }

  /// Writes d loss / d params into grad and returns the loss.
  double gradient(std::span<const double> x, std::span<const double> target,
                  std::span<double> grad) const {
    std::vector<double> hid(h_), out(k_), delta_out(k_), delta_hid(h_, 0.0);
    forward(x, hid, out);
    const double* w2 = params_.data() + h_ * d_ + h_;
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + h_ * d_;
    double* g_w2 = g_b1 + h_;
    double* g_b2 = g_w2 + k_ * h_;
    double l = 0.0;
    for (std::size_t o = 0; o < k_; ++o) {
      const double err = out[o] - target[o];
      l += 0.5 * err * err;
      delta_out[o] = err * out[o] * (1.0 - out[o]);
      g_b2[o] = delta_out[o];
      for (std::size_t j = 0; j < h_; ++j) {
        g_w2[o * h_ + j] = delta_out[o] * hid[j];
        delta_hid[j] += w2[o * h_ + j] * delta_out[o];
      }
    }
    for (std::size_t j = 0; j < h_; ++j) {
      const double dj = delta_hid[j] * hid[j] * (1.0 - hid[j]);
      g_b1[j] = dj;
      for (std::size_t i = 0; i < d_; ++i) g_w1[j * d_ + i] = dj * x[i];
    }
    return l;
  }

  bool operator==(const MlpNetwork&) const = default;

 private:
  std::size_t d_ = 0, h_ = 0, k_ = 0;
  std::vector<double> params_;
};

struct MlpModel {
  MlpConfig config;
  std::vector<int> classes;
  MinMaxScaler scaler;
  MlpNetwork net;
  std::vector<double> epoch_loss;  // summed training loss per epoch

  std::vector<double> outputs(std::span<const double> raw) const {
    return net.output(scaler.transform(raw));
  }

  int predict(std::span<const double> raw) const {
    const auto out = outputs(raw);
    const auto best = std::max_element(out.begin(), out.end());
    return classes[static_cast<std::size_t>(best - out.begin())];
  }

  bool operator==(const MlpModel& o) const {
    return config == o.config && classes == o.classes && scaler == o.scaler && net == o.net;
  }
};

/// A single-class training set is accepted; the network then learns a
/// constant output and predicts that class everywhere.
inline MlpModel train_mlp(const Matrix& x, std::span<const int> labels, const MlpConfig& cfg) {
  validate(cfg);
  detail::check_training_set(x, labels);
  MlpModel model;
  model.config = cfg;
  model.classes = detail::sorted_classes(labels);
  model.scaler = MinMaxScaler::fit(x);
  const Matrix xs = model.scaler.transform(x);
  const std::size_t n = x.rows(), k = model.classes.size();

  Matrix targets(n, k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), labels[r]);
    targets(r, static_cast<std::size_t>(it - model.classes.begin())) = 1.0;
  }

  Rng rng(cfg.seed);
  model.net = MlpNetwork(x.cols(), cfg.hidden_units, k);
  model.net.init_uniform(rng, cfg.init_range);
  auto& params = model.net.params();
  std::vector<double> grad(params.size()), velocity(params.size(), 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t r : order) {
      total += model.net.gradient(xs.row(r), targets.row(r), grad);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = cfg.momentum * velocity[p] - cfg.learning_rate * grad[p];
        params[p] += velocity[p];
      }
    }
    if (!std::isfinite(total))
      fail(ErrorCode::NonFiniteLoss, "mlp: training loss became non-finite at epoch " +
                                         std::to_string(epoch + 1));
    model.epoch_loss.push_back(total);
  }
  return model;
}

}  // namespace emorec
