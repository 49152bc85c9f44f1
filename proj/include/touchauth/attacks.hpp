#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/auth_model.hpp"
#include "touchauth/feature_engine.hpp"

namespace touchauth {

enum class AttackScenario { zero_effort_same, zero_effort_cross, population, random_vector };

// Config/report tokens: zero_same, zero_cross, population, random.
std::string scenario_name(AttackScenario s);
AttackScenario scenario_from_string(const std::string& s);

struct AttackOutcome {
  std::string model_id;
  AttackScenario scenario = AttackScenario::zero_effort_same;
  std::string dataset_id;  // source dataset for zero-effort runs, else empty
  std::size_t accepted = 0;
  std::size_t total = 0;
  double far = 0.0;
};

nlohmann::json outcome_to_json(const AttackOutcome& o);
AttackOutcome outcome_from_json(const nlohmann::json& j);

// Raw (pre-normalization) window vectors of one dataset; user_id set per window.
struct WindowSet {
  std::string dataset_id;
  std::vector<WindowVector> windows;
};

// Replays the set's windows through the victim pipeline (the model's own
// normalizer + selector) and counts acceptances. Windows of the genuine user
// are excluded when the set belongs to the model's own dataset.
/// Pre: at least one impostor window remains (NoImpostorDataError).
AttackOutcome zero_effort_attack(const AuthModel& model, const WindowSet& set);

// Per-model, per-dataset grid of the above.
std::vector<AttackOutcome> zero_effort_attack(const std::vector<const AuthModel*>& models,
                                              const std::vector<const WindowSet*>& sets);

struct PopulationStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
};

// Per-dimension mean/stddev over the pooled window vectors of the external
// datasets, taken in the victim model's input space (normalize + select).
// Pre: sets exclude the model's own dataset and pool >= 1 window
// (EmptyPoolError).
PopulationStats population_stats(const std::vector<const WindowSet*>& sets,
                                 const AuthModel& model);

// N vectors with dimension i set to mean_i + r*stddev_i, r ~ normal(0, sd 3)
// drawn per entry in row-major order from Rng(seed), clamped to [0,1], scored
// against the model.
AttackOutcome population_attack(const AuthModel& model, const PopulationStats& stats,
                                std::size_t n, std::uint64_t seed);

// N vectors of i.i.d. U(0,1) entries consumed row-major from Rng(seed);
// dim must equal the model input dimension.
AttackOutcome random_vector_attack(const AuthModel& model, std::size_t dim, std::size_t n,
                                   std::uint64_t seed);

}  // namespace touchauth
