#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/dense_net.hpp"
#include "touchauth/evaluation.hpp"
#include "touchauth/feature_engine.hpp"

namespace touchauth {

struct GanTrainConfig {
  int epochs = 300;
  int batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int d_steps = 1;  // discriminator updates per generator update
  int noise_dim = 32;
  std::vector<int> gen_hidden = {64, 64};
  std::vector<int> disc_hidden = {64, 64};
  double leak = 0.2;
  std::uint64_t seed = 0;
};

struct GanTrainLog {
  std::vector<double> d_loss;  // per-epoch means
  std::vector<double> g_loss;
  std::vector<double> first_epoch_d_steps;  // per-step discriminator losses, epoch 0
};

struct Gan {
  DenseNet generator;
  DenseNet discriminator;
  int noise_dim = 0;
  GanTrainLog log;

  nlohmann::json to_json() const;
  static Gan from_json(const nlohmann::json& j);
};

// Genuine-class and impostor-class generator/discriminator pairs sharing one
// input space (the model's normalized, feature-selected window vectors).
struct GanPair {
  Gan genuine;
  Gan impostor;

  int input_dim() const { return genuine.generator.output_dim(); }
  nlohmann::json to_json() const;
  static GanPair from_json(const nlohmann::json& j);
};

// Adversarial training on one class of normalized window vectors (values in
// [0,1]). The discriminator ascends log D(x) + log(1-D(G(z))); the generator
// uses the non-saturating surrogate (maximize log D(G(z))). Noise is standard
// normal of noise_dim. Only full batches are visited; the per-epoch shuffle
// rotates the remainder. Pre: rows.size() >= 2*batch_size, entries in [0,1].
// Throws NonFiniteLossError with the epoch index if a loss degenerates.
Gan train_gan(const std::vector<std::vector<double>>& rows, const GanTrainConfig& cfg);

// Deterministic sampling: per vector, noise_dim standard-normal draws feed the
// generator; outputs lie in [0,1] (sigmoid). Windows carry `label`
// (synthetic_genuine or synthetic_impostor) and window_index -1.
std::vector<WindowVector> generate_samples(const DenseNet& generator, int noise_dim,
                                           std::size_t count, std::uint64_t seed,
                                           WindowLabel label);

// Returns the candidate synthetic-sample count with the lowest validation
// HTER (ties -> smaller count). A single candidate is returned without
// invoking the callback.
int tune_synth_count(const std::vector<int>& candidates,
                     const std::function<double(int)>& validation_hter);

struct GanQualityDim {
  std::size_t dim = 0;
  KdeCurve real;
  KdeCurve generated;
  double overlap = 0.0;  // integral of the min of the two unit-interval densities
};

struct GanQualityReport {
  std::vector<GanQualityDim> dims;
  double mean_overlap = 0.0;
};

// Per-dimension real-vs-generated density curves plus their overlap on a
// 256-point grid over [0,1].
GanQualityReport gan_quality_report(const std::vector<WindowVector>& real,
                                    const std::vector<WindowVector>& generated,
                                    const std::vector<std::size_t>& dims);

}  // namespace touchauth
