#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/rng.hpp"

namespace touchauth {

enum class Activation { leaky_relu, sigmoid, linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

double stable_sigmoid(double x);

// Probabilities are clamped to [kProbClamp, 1-kProbClamp] before taking logs.
inline constexpr double kProbClamp = 1e-7;
double clamp_prob(double p);
// -[t ln p + (1-t) ln(1-p)] on the clamped probability.
double bce_loss(double p, double target);
// d(bce_loss)/dp; zero where the clamp flattens the loss.
double bce_loss_dp(double p, double target);

// Fully connected feed-forward net. Parameters live in one flat vector laid
// out layer by layer as [W0 row-major | b0 | W1 | b1 | ...], where W has shape
// (outputs x inputs). Hidden layers share one activation; the last layer uses
// the output activation.
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(std::vector<int> widths, Activation hidden, Activation output, double leak = 0.2);

  // Gaussian init scaled by fan-in (He-style for hidden layers, 1/fan_in for
  // the output layer); biases zero. Weight draws are row-major per layer.
  void init_weights(Rng& rng);

  std::vector<double> forward(const std::vector<double>& input) const;

  // Per-layer values recorded by the training-time forward pass.
  // post[0] is the input; post[l+1] = activation(pre[l]).
  struct Trace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
  };
  std::vector<double> forward(const std::vector<double>& input, Trace& trace) const;

  // Backpropagates d(loss)/d(output), adds parameter gradients into
  // grad_params (sized parameter_count()), returns d(loss)/d(input).
  std::vector<double> backward(const Trace& trace, const std::vector<double>& grad_output,
                               std::vector<double>& grad_params) const;

  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  std::size_t layer_count() const { return widths_.size() - 1; }
  double leak() const { return leak_; }

  nlohmann::json to_json() const;
  static DenseNet from_json(const nlohmann::json& j);

 private:
  double activate(double x, Activation a) const;
  double activate_grad(double pre, double post, Activation a) const;

  std::vector<int> widths_;
  Activation hidden_ = Activation::leaky_relu;
  Activation output_ = Activation::sigmoid;
  double leak_ = 0.2;
  std::vector<double> params_;
  std::vector<std::size_t> w_off_;
  std::vector<std::size_t> b_off_;
};

// Per-parameter adaptive moment optimizer with bias correction.
struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig cfg);
  void step(std::vector<double>& params, const std::vector<double>& grads);

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_count_ = 0;
};

// Plain mini-batch gradient descent.
class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(std::vector<double>& params, const std::vector<double>& grads);

 private:
  double lr_;
};

}  // namespace touchauth
