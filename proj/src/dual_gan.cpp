#include "touchauth/dual_gan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "touchauth/errors.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {

nlohmann::json Gan::to_json() const {
  return nlohmann::json{{"generator", generator.to_json()},
                        {"discriminator", discriminator.to_json()},
                        {"noise_dim", noise_dim},
                        {"d_loss", log.d_loss},
                        {"g_loss", log.g_loss}};
}

Gan Gan::from_json(const nlohmann::json& j) {
  Gan gan;
  gan.generator = DenseNet::from_json(j.at("generator"));
  gan.discriminator = DenseNet::from_json(j.at("discriminator"));
  gan.noise_dim = j.at("noise_dim").get<int>();
  gan.log.d_loss = j.at("d_loss").get<std::vector<double>>();
  gan.log.g_loss = j.at("g_loss").get<std::vector<double>>();
  return gan;
}

nlohmann::json GanPair::to_json() const {
  return nlohmann::json{{"genuine", genuine.to_json()}, {"impostor", impostor.to_json()}};
}

GanPair GanPair::from_json(const nlohmann::json& j) {
  GanPair pair;
  pair.genuine = Gan::from_json(j.at("genuine"));
  pair.impostor = Gan::from_json(j.at("impostor"));
  return pair;
}

namespace {

void validate_gan_config(const GanTrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("gan: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("gan: batch size must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("gan: step size must be positive");
  if (cfg.d_steps < 1) throw ConfigError("gan: d_steps must be >= 1");
  if (cfg.noise_dim < 1) throw ConfigError("gan: noise_dim must be >= 1");
}

std::vector<double> sample_noise(Rng& rng, int noise_dim) {
  std::vector<double> z(static_cast<std::size_t>(noise_dim));
  for (auto& v : z) v = rng.normal();
  return z;
}

}  // namespace

Gan train_gan(const std::vector<std::vector<double>>& rows, const GanTrainConfig& cfg) {
  validate_gan_config(cfg);
  if (rows.size() < 2 * static_cast<std::size_t>(cfg.batch_size)) {
    throw TooFewSamplesError("gan training needs at least 2*batch_size samples");
  }
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionMismatchError("gan: ragged training rows");
    for (double v : r) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("gan: training values must lie in [0,1]");
    }
  }

  std::vector<int> gen_widths;
  gen_widths.push_back(cfg.noise_dim);
  gen_widths.insert(gen_widths.end(), cfg.gen_hidden.begin(), cfg.gen_hidden.end());
  gen_widths.push_back(static_cast<int>(dim));
  std::vector<int> disc_widths;
  disc_widths.push_back(static_cast<int>(dim));
  disc_widths.insert(disc_widths.end(), cfg.disc_hidden.begin(), cfg.disc_hidden.end());
  disc_widths.push_back(1);

  Gan gan;
  gan.noise_dim = cfg.noise_dim;
  gan.generator = DenseNet(gen_widths, Activation::leaky_relu, Activation::sigmoid, cfg.leak);
  gan.discriminator = DenseNet(disc_widths, Activation::leaky_relu, Activation::sigmoid, cfg.leak);

  Rng rng(cfg.seed);
  gan.generator.init_weights(rng);
  gan.discriminator.init_weights(rng);

  const AdamConfig adam{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
  Adam opt_g(gan.generator.parameter_count(), adam);
  Adam opt_d(gan.discriminator.parameter_count(), adam);

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t n_batches = rows.size() / batch;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  std::vector<double> grad_d(gan.discriminator.parameter_count());
  std::vector<double> grad_g(gan.generator.parameter_count());
  std::vector<double> disc_scratch(gan.discriminator.parameter_count());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_d = 0.0;
    double epoch_g = 0.0;
    std::size_t g_steps = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      // Discriminator: real batch toward 1, fresh fakes toward 0.
      std::fill(grad_d.begin(), grad_d.end(), 0.0);
      double d_loss = 0.0;
      for (std::size_t s = 0; s < batch; ++s) {
        const auto& x = rows[order[b * batch + s]];
        DenseNet::Trace trace;
        const double p = gan.discriminator.forward(x, trace).front();
        d_loss += bce_loss(p, 1.0) * inv_batch;
        gan.discriminator.backward(trace, {bce_loss_dp(p, 1.0) * inv_batch}, grad_d);
      }
      for (std::size_t s = 0; s < batch; ++s) {
        const auto fake = gan.generator.forward(sample_noise(rng, cfg.noise_dim));
        DenseNet::Trace trace;
        const double p = gan.discriminator.forward(fake, trace).front();
        d_loss += bce_loss(p, 0.0) * inv_batch;
        gan.discriminator.backward(trace, {bce_loss_dp(p, 0.0) * inv_batch}, grad_d);
      }
      opt_d.step(gan.discriminator.parameters(), grad_d);
      epoch_d += d_loss;
      if (epoch == 0) gan.log.first_epoch_d_steps.push_back(d_loss);

      if ((b + 1) % static_cast<std::size_t>(cfg.d_steps) != 0) continue;

      // Generator: non-saturating update, push D(G(z)) toward 1.
      std::fill(grad_g.begin(), grad_g.end(), 0.0);
      std::fill(disc_scratch.begin(), disc_scratch.end(), 0.0);
      double g_loss = 0.0;
      for (std::size_t s = 0; s < batch; ++s) {
        DenseNet::Trace trace_g;
        const auto fake = gan.generator.forward(sample_noise(rng, cfg.noise_dim), trace_g);
        DenseNet::Trace trace_d;
        const double p = gan.discriminator.forward(fake, trace_d).front();
        g_loss += bce_loss(p, 1.0) * inv_batch;
        const auto grad_fake =
            gan.discriminator.backward(trace_d, {bce_loss_dp(p, 1.0) * inv_batch}, disc_scratch);
        gan.generator.backward(trace_g, grad_fake, grad_g);
      }
      opt_g.step(gan.generator.parameters(), grad_g);
      epoch_g += g_loss;
      ++g_steps;
    }
    epoch_d /= static_cast<double>(n_batches);
    epoch_g /= static_cast<double>(std::max<std::size_t>(1, g_steps));
    if (!std::isfinite(epoch_d) || !std::isfinite(epoch_g)) {
      throw NonFiniteLossError(static_cast<std::size_t>(epoch), "gan epoch loss is not finite");
    }
    gan.log.d_loss.push_back(epoch_d);
    gan.log.g_loss.push_back(epoch_g);
  }
  return gan;
}

std::vector<WindowVector> generate_samples(const DenseNet& generator, int noise_dim,
                                           std::size_t count, std::uint64_t seed,
                                           WindowLabel label) {
  if (noise_dim != generator.input_dim()) {
    throw DimensionMismatchError("generator noise dimension mismatch");
  }
  Rng rng(seed);
  std::vector<WindowVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    WindowVector w;
    w.values = generator.forward(sample_noise(rng, noise_dim));
    w.window_index = -1;
    w.label = label;
    out.push_back(std::move(w));
  }
  return out;
}

int tune_synth_count(const std::vector<int>& candidates,
                     const std::function<double(int)>& validation_hter) {
  if (candidates.empty()) throw ConfigError("synth count candidates must be non-empty");
  std::vector<int> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int c : sorted) {
    if (c < 1) throw ConfigError("synth count candidates must be positive");
  }
  if (sorted.size() == 1) return sorted.front();
  int best = sorted.front();
  double best_hter = validation_hter(best);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double h = validation_hter(sorted[i]);
    if (h < best_hter) {
      best_hter = h;
      best = sorted[i];
    }
  }
  return best;
}

GanQualityReport gan_quality_report(const std::vector<WindowVector>& real,
                                    const std::vector<WindowVector>& generated,
                                    const std::vector<std::size_t>& dims) {
  if (real.empty() || generated.empty()) {
    throw EmptyListError("gan quality report needs real and generated samples");
  }
  const std::size_t width = real.front().values.size();
  if (generated.front().values.size() != width) {
    throw DimensionMismatchError("real/generated dimension mismatch");
  }
  GanQualityReport report;
  for (std::size_t d : dims) {
    if (d >= width) throw ConfigError("gan quality dimension out of range");
    std::vector<double> col_real;
    col_real.reserve(real.size());
    for (const auto& w : real) col_real.push_back(w.values[d]);
    std::vector<double> col_gen;
    col_gen.reserve(generated.size());
    for (const auto& w : generated) col_gen.push_back(w.values[d]);
    GanQualityDim entry;
    entry.dim = d;
    entry.real = kde_density(col_real, 256);
    entry.generated = kde_density(col_gen, 256);
    entry.overlap = density_overlap_unit_interval(col_real, col_gen, 256);
    report.dims.push_back(std::move(entry));
  }
  if (!report.dims.empty()) {
    double sum = 0.0;
    for (const auto& e : report.dims) sum += e.overlap;
    report.mean_overlap = sum / static_cast<double>(report.dims.size());
  }
  return report;
}

}  // namespace touchauth
