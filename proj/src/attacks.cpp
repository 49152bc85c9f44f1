#include "touchauth/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "touchauth/errors.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {

std::string scenario_name(AttackScenario s) {
  switch (s) {
    case AttackScenario::zero_effort_same: return "zero_same";
    case AttackScenario::zero_effort_cross: return "zero_cross";
    case AttackScenario::population: return "population";
    case AttackScenario::random_vector: return "random";
  }
  return "zero_same";
}

AttackScenario scenario_from_string(const std::string& s) {
  if (s == "zero_same") return AttackScenario::zero_effort_same;
  if (s == "zero_cross") return AttackScenario::zero_effort_cross;
  if (s == "population") return AttackScenario::population;
  if (s == "random") return AttackScenario::random_vector;
  throw ConfigError("unknown scenario '" + s +
                    "' (expected zero_same, zero_cross, population, or random)");
}

nlohmann::json outcome_to_json(const AttackOutcome& o) {
  return nlohmann::json{{"model_id", o.model_id},
                        {"scenario", scenario_name(o.scenario)},
                        {"dataset_id", o.dataset_id},
                        {"accepted", o.accepted},
                        {"total", o.total},
                        {"far", o.far}};
}

AttackOutcome outcome_from_json(const nlohmann::json& j) {
  AttackOutcome o;
  o.model_id = j.at("model_id").get<std::string>();
  o.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  o.dataset_id = j.at("dataset_id").get<std::string>();
  o.accepted = j.at("accepted").get<std::size_t>();
  o.total = j.at("total").get<std::size_t>();
  o.far = j.at("far").get<double>();
  return o;
}

namespace {

AttackOutcome make_outcome(const AuthModel& model, AttackScenario scenario,
                           const std::string& dataset_id, std::size_t accepted,
                           std::size_t total) {
  AttackOutcome o;
  o.model_id = model.model_id;
  o.scenario = scenario;
  o.dataset_id = dataset_id;
  o.accepted = accepted;
  o.total = total;
  o.far = static_cast<double>(accepted) / static_cast<double>(total);
  return o;
}

}  // namespace

AttackOutcome zero_effort_attack(const AuthModel& model, const WindowSet& set) {
  const bool same_dataset = set.dataset_id == model.dataset_id;
  std::size_t accepted = 0;
  std::size_t total = 0;
  for (const auto& w : set.windows) {
    if (same_dataset && w.user_id == model.user_id) continue;
    ++total;
    if (model.accept_raw(w.values)) ++accepted;
  }
  if (total == 0) throw NoImpostorDataError(set.dataset_id);
  const auto kind =
      same_dataset ? AttackScenario::zero_effort_same : AttackScenario::zero_effort_cross;
  return make_outcome(model, kind, set.dataset_id, accepted, total);
}

std::vector<AttackOutcome> zero_effort_attack(const std::vector<const AuthModel*>& models,
                                              const std::vector<const WindowSet*>& sets) {
  std::vector<AttackOutcome> out;
  out.reserve(models.size() * sets.size());
  for (const AuthModel* model : models) {
    for (const WindowSet* set : sets) out.push_back(zero_effort_attack(*model, *set));
  }
  return out;
}

PopulationStats population_stats(const std::vector<const WindowSet*>& sets,
                                 const AuthModel& model) {
  for (const WindowSet* set : sets) {
    if (set->dataset_id == model.dataset_id) {
      throw ConfigError("population statistics must exclude the model's own dataset");
    }
  }
  std::vector<std::vector<double>> pool;
  for (const WindowSet* set : sets) {
    for (const auto& w : set->windows) pool.push_back(model.model_input(w.values));
  }
  if (pool.empty()) throw EmptyPoolError("population statistics pool is empty");

  const std::size_t dim = pool.front().size();
  PopulationStats stats;
  stats.mean.assign(dim, 0.0);
  stats.stddev.assign(dim, 0.0);
  for (const auto& v : pool) {
    for (std::size_t d = 0; d < dim; ++d) stats.mean[d] += v[d];
  }
  const double n = static_cast<double>(pool.size());
  for (std::size_t d = 0; d < dim; ++d) stats.mean[d] /= n;
  for (const auto& v : pool) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = v[d] - stats.mean[d];
      stats.stddev[d] += diff * diff;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) stats.stddev[d] = std::sqrt(stats.stddev[d] / n);
  return stats;
}

AttackOutcome population_attack(const AuthModel& model, const PopulationStats& stats,
                                std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("attack vector count must be >= 1");
  const std::size_t dim = model.input_dim();
  if (stats.mean.size() != dim || stats.stddev.size() != dim) {
    throw DimensionMismatchError("population statistics do not match the model input dimension");
  }
  Rng rng(seed);
  std::vector<double> v(dim);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = std::clamp(stats.mean[d] + rng.normal(0.0, 3.0) * stats.stddev[d], 0.0, 1.0);
    }
    if (model.accept_input(v)) ++accepted;
  }
  return make_outcome(model, AttackScenario::population, "", accepted, n);
}

AttackOutcome random_vector_attack(const AuthModel& model, std::size_t dim, std::size_t n,
                                   std::uint64_t seed) {
  if (n < 1) throw ConfigError("attack vector count must be >= 1");
  if (dim != model.input_dim()) {
    throw DimensionMismatchError("attack vector length does not match the model input dimension");
  }
  Rng rng(seed);
  std::vector<double> v(dim);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) v[d] = rng.uniform();
    if (model.accept_input(v)) ++accepted;
  }
  return make_outcome(model, AttackScenario::random_vector, "", accepted, n);
}

}  // namespace touchauth
