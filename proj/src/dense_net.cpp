#include "touchauth/dense_net.hpp"

#include <algorithm>
#include <cmath>

#include "touchauth/errors.hpp"

namespace touchauth {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
  }
  return "linear";
}

Activation activation_from_string(const std::string& s) {
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "linear") return Activation::linear;
  throw ConfigError("unknown activation: " + s);
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double bce_loss(double p, double target) {
  const double c = clamp_prob(p);
  return -(target * std::log(c) + (1.0 - target) * std::log(1.0 - c));
}

double bce_loss_dp(double p, double target) {
  if (p <= kProbClamp || p >= 1.0 - kProbClamp) return 0.0;
  return -target / p + (1.0 - target) / (1.0 - p);
}

DenseNet::DenseNet(std::vector<int> widths, Activation hidden, Activation output, double leak)
    : widths_(std::move(widths)), hidden_(hidden), output_(output), leak_(leak) {
  if (widths_.size() < 2) throw ConfigError("dense net needs at least one layer");
  for (int w : widths_) {
    if (w < 1) throw ConfigError("dense net layer width must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    w_off_.push_back(total);
    total += static_cast<std::size_t>(widths_[l]) * static_cast<std::size_t>(widths_[l + 1]);
    b_off_.push_back(total);
    total += static_cast<std::size_t>(widths_[l + 1]);
  }
  params_.assign(total, 0.0);
}

void DenseNet::init_weights(Rng& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto fan_in = static_cast<double>(widths_[l]);
    const bool last = (l + 1 == layer_count());
    const double scale = last ? std::sqrt(1.0 / fan_in) : std::sqrt(2.0 / fan_in);
    double* w = params_.data() + w_off_[l];
    const std::size_t n = static_cast<std::size_t>(widths_[l]) * static_cast<std::size_t>(widths_[l + 1]);
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.normal() * scale;
    double* b = params_.data() + b_off_[l];
    for (int j = 0; j < widths_[l + 1]; ++j) b[j] = 0.0;
  }
}

double DenseNet::activate(double x, Activation a) const {
  switch (a) {
    case Activation::leaky_relu: return x > 0.0 ? x : leak_ * x;
    case Activation::sigmoid: return stable_sigmoid(x);
    case Activation::linear: return x;
  }
  return x;
}

double DenseNet::activate_grad(double pre, double post, Activation a) const {
  switch (a) {
    case Activation::leaky_relu: return pre > 0.0 ? 1.0 : leak_;
    case Activation::sigmoid: return post * (1.0 - post);
    case Activation::linear: return 1.0;
  }
  return 1.0;
}

std::vector<double> DenseNet::forward(const std::vector<double>& input) const {
  Trace trace;
  return forward(input, trace);
}

std::vector<double> DenseNet::forward(const std::vector<double>& input, Trace& trace) const {
  if (input.size() != static_cast<std::size_t>(widths_.front())) {
    throw DimensionMismatchError("dense net input size mismatch");
  }
  trace.pre.assign(layer_count(), {});
  trace.post.assign(layer_count() + 1, {});
  trace.post[0] = input;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const int in_w = widths_[l];
    const int out_w = widths_[l + 1];
    const Activation act = (l + 1 == layer_count()) ? output_ : hidden_;
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    const std::vector<double>& x = trace.post[l];
    auto& pre = trace.pre[l];
    auto& post = trace.post[l + 1];
    pre.resize(static_cast<std::size_t>(out_w));
    post.resize(static_cast<std::size_t>(out_w));
    for (int j = 0; j < out_w; ++j) {
      const double* row = w + static_cast<std::size_t>(j) * static_cast<std::size_t>(in_w);
      double sum = b[j];
      for (int i = 0; i < in_w; ++i) sum += row[i] * x[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(j)] = sum;
      post[static_cast<std::size_t>(j)] = activate(sum, act);
    }
  }
  return trace.post.back();
}

std::vector<double> DenseNet::backward(const Trace& trace, const std::vector<double>& grad_output,
                                       std::vector<double>& grad_params) const {
  if (grad_params.size() != params_.size()) {
    throw DimensionMismatchError("gradient buffer size mismatch");
  }
  std::vector<double> grad_post = grad_output;
  for (std::size_t li = layer_count(); li-- > 0;) {
    const int in_w = widths_[li];
    const int out_w = widths_[li + 1];
    const Activation act = (li + 1 == layer_count()) ? output_ : hidden_;
    const double* w = params_.data() + w_off_[li];
    double* gw = grad_params.data() + w_off_[li];
    double* gb = grad_params.data() + b_off_[li];
    const auto& pre = trace.pre[li];
    const auto& post = trace.post[li + 1];
    const auto& x = trace.post[li];
    std::vector<double> grad_in(static_cast<std::size_t>(in_w), 0.0);
    for (int j = 0; j < out_w; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double dpre = grad_post[ju] * activate_grad(pre[ju], post[ju], act);
      gb[j] += dpre;
      const double* row = w + ju * static_cast<std::size_t>(in_w);
      double* grow = gw + ju * static_cast<std::size_t>(in_w);
      for (int i = 0; i < in_w; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        grow[i] += dpre * x[iu];
        grad_in[iu] += dpre * row[i];
      }
    }
    grad_post = std::move(grad_in);
  }
  return grad_post;
}

nlohmann::json DenseNet::to_json() const {
  return nlohmann::json{{"widths", widths_},
                        {"hidden", to_string(hidden_)},
                        {"output", to_string(output_)},
                        {"leak", leak_},
                        {"params", params_}};
}

DenseNet DenseNet::from_json(const nlohmann::json& j) {
  DenseNet net(j.at("widths").get<std::vector<int>>(),
               activation_from_string(j.at("hidden").get<std::string>()),
               activation_from_string(j.at("output").get<std::string>()),
               j.at("leak").get<double>());
  auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != net.parameter_count()) {
    throw DataError("dense net parameter payload does not match layer sizes");
  }
  net.params_ = std::move(params);
  return net;
}

Adam::Adam(std::size_t n_params, AdamConfig cfg)
    : cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionMismatchError("adam buffer size mismatch");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

void Sgd::step(std::vector<double>& params, const std::vector<double>& grads) {
  if (params.size() != grads.size()) throw DimensionMismatchError("sgd buffer size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grads[i];
}

}  // namespace touchauth
