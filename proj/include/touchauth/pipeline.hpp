#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/adasyn.hpp"
#include "touchauth/attacks.hpp"
#include "touchauth/auth_model.hpp"
#include "touchauth/classifiers.hpp"
#include "touchauth/data_model.hpp"
#include "touchauth/dual_gan.hpp"
#include "touchauth/evaluation.hpp"

namespace touchauth {

struct SynthSpec {
  int num_datasets = 2;
  int users = 20;
  int swipes_per_user = 120;
  double profile_spread = 1.0;
};

struct CorpusSource {
  std::string swipes_path;
  std::string gender_path;  // optional
};

struct ExperimentConfig {
  std::vector<CorpusSource> corpora;  // empty -> datasets synthesized per `synth`
  SynthSpec synth;
  double train_fraction = 0.6;
  int window_p = 5;
  int window_q = 1;
  std::vector<std::string> classifiers = {"mlp", "rf"};
  std::vector<Architecture> architectures = {Architecture::V, Architecture::G};
  std::vector<AttackScenario> scenarios = {
      AttackScenario::zero_effort_same, AttackScenario::zero_effort_cross,
      AttackScenario::population, AttackScenario::random_vector};
  std::vector<std::uint64_t> seeds = {42};
  std::vector<int> k_grid = {25, 50, 100, 150, 235};
  int cv_folds = 5;
  int adasyn_neighbors = 5;
  double adasyn_beta = 1.0;
  GanTrainConfig gan;           // seed field ignored; per-model streams are derived
  int gan_impostor_cap = 512;   // impostor windows fed to the impostor GAN; 0 = all
  std::vector<int> synth_count_candidates = {250};  // per class; >1 entries are CV-tuned
  int attack_vectors = 10000;
  int impostor_train_cap = 0;   // impostor training windows per model; 0 = all
  RfConfig rf;
  MlpConfig mlp;
  bool persist_models = false;
  bool persist_gans = false;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
// Accepts either a config file or an experiment manifest (whose config echo
// is then used).
ExperimentConfig load_config_file(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& cfg);

// Stage outputs shared by every model of one run seed.
struct PreparedData {
  std::vector<Corpus> corpora;  // [0] is the primary dataset
  SplitPlan split;              // chronological split of the primary dataset
  std::map<std::string, std::vector<WindowVector>> train_windows;  // raw values, per user
  std::map<std::string, std::vector<WindowVector>> test_windows;
  WindowSet primary_test_pool;          // every user's test windows (zero_same source)
  std::vector<WindowSet> external_pools;  // full window sets of the other datasets
  std::size_t swipes_skipped_degenerate = 0;
};

PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed);

struct TrainedModel {
  AuthModel model;
  double train_eer = 0.0;  // EER at the chosen threshold on pooled CV scores
  std::size_t n_train_genuine = 0;
  std::size_t n_train_impostor = 0;
  int synth_count = 0;  // GAN samples appended per class (G only)
};

// Trains every configured architecture for one (user, classifier, seed) cell.
// The cell shares one normalizer, feature selector, and fold plan; the GAN
// pair is trained once on the shared input space and attached to the G model.
std::vector<TrainedModel> train_user_models(const std::string& user_id, const PreparedData& data,
                                            const ExperimentConfig& cfg,
                                            const std::string& classifier_kind,
                                            std::uint64_t seed);

// Single-architecture convenience wrapper over train_user_models.
AuthModel train_user_model(const std::string& user_id, const PreparedData& data,
                           const ExperimentConfig& cfg, const std::string& classifier_kind,
                           Architecture architecture, std::uint64_t seed);

// Runs every configured scenario against one model; per-(model, scenario)
// RNG streams are derived from (seed, scenario tag, model id).
std::vector<AttackOutcome> run_attacks(const AuthModel& model, const PreparedData& data,
                                       const ExperimentConfig& cfg, std::uint64_t seed);

struct ModelSummary {
  std::string model_id;
  std::string user_id;
  std::string dataset_id;
  std::string classifier;
  std::string architecture;
  std::uint64_t seed = 0;
  Gender gender = Gender::unspecified;
  double threshold = 0.0;
  double train_eer = 0.0;
  double frr = 0.0;
  std::size_t n_genuine_test = 0;
  std::size_t selected_dims = 0;
  std::size_t n_train_genuine = 0;
  std::size_t n_train_impostor = 0;
  int synth_count = 0;
};

nlohmann::json model_summary_to_json(const ModelSummary& m);
ModelSummary model_summary_from_json(const nlohmann::json& j);

struct FailureRecord {
  std::string cell;
  std::string error;
};

struct ExperimentManifest {
  ExperimentConfig config;
  std::vector<ModelSummary> models;
  std::vector<AttackOutcome> outcomes;
  std::vector<EvalReport> reports;
  std::vector<FailureRecord> failures;
  std::vector<std::pair<std::string, std::string>> stage_hashes;  // name -> fnv1a hex
  double wall_clock_seconds = 0.0;
  std::vector<nlohmann::json> persisted_models;  // filled when config.persist_models
};

using ProgressFn = std::function<void(const std::string&)>;

ExperimentManifest run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

// One report per (model, configured scenario); zero_cross pools its
// per-dataset outcomes into a single report.
std::vector<EvalReport> assemble_reports(const std::vector<ModelSummary>& models,
                                         const std::vector<AttackOutcome>& outcomes,
                                         const std::vector<AttackScenario>& scenarios);

nlohmann::json manifest_to_json(const ExperimentManifest& m);

// Writes manifest.json, reports.json, attacks.json, heatmap.csv/.json,
// fairness.json, and models.json (when persisted) under out_dir.
void write_experiment_outputs(const ExperimentManifest& m, const std::filesystem::path& out_dir);

}  // namespace touchauth
