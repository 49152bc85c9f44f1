#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "touchauth/attacks.hpp"
#include "touchauth/auth_model.hpp"
#include "touchauth/data_model.hpp"
#include "touchauth/errors.hpp"
#include "touchauth/evaluation.hpp"
#include "touchauth/feature_engine.hpp"
#include "touchauth/pipeline.hpp"
#include "touchauth/rng.hpp"
#include "touchauth/text_util.hpp"
#include "touchauth/version.hpp"

namespace {

using namespace touchauth;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + std::string(e.what()));
  }
  return j;
}

ExperimentConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return ExperimentConfig{};
  return load_config_file(config_path);
}

int manifest_exit_code(const ExperimentManifest& m) {
  if (m.failures.empty()) return kExitOk;
  return m.models.empty() ? kExitData : kExitPartial;
}

ProgressFn stderr_progress(bool quiet) {
  if (quiet) return {};
  return [](const std::string& line) { std::cerr << line << "\n"; };
}

int cmd_ingest(const std::string& swipes_path, const std::string& gender_path,
               const std::string& config_path, const std::string& out_dir,
               const std::string& export_features) {
  const ExperimentConfig cfg = load_or_default(config_path);
  ParseStats stats;
  Corpus corpus = parse_swipe_csv(swipes_path, &stats);
  if (!gender_path.empty()) {
    for (const auto& [user, gender] : parse_gender_csv(gender_path)) {
      corpus.user_metadata[user].gender = gender;
    }
  }
  const std::size_t before = corpus.swipes.size();
  corpus = filter_short_swipes(corpus);

  std::size_t degenerate = 0;
  std::vector<WindowVector> windows;
  for (const auto& user : corpus.user_ids()) {
    std::vector<FeatureVector> feats;
    for (const auto& swipe : corpus.swipes) {
      if (swipe.user_id != user) continue;
      try {
        feats.push_back(extract_features(swipe));
      } catch (const DegenerateSwipeError&) {
        ++degenerate;
      }
    }
    auto user_windows = build_windows(feats, cfg.window_p, cfg.window_q);
    windows.insert(windows.end(), user_windows.begin(), user_windows.end());
  }

  const nlohmann::json summary{{"schema_version", kSchemaVersion},
                               {"dataset_id", corpus.dataset_id},
                               {"users", corpus.user_ids().size()},
                               {"rows", stats.rows},
                               {"swipes_parsed", stats.swipes_parsed},
                               {"swipes_dropped_nonmonotone", stats.swipes_dropped_nonmonotone},
                               {"swipes_dropped_short", before - corpus.swipes.size()},
                               {"swipes_kept", corpus.swipes.size()},
                               {"swipes_degenerate", degenerate},
                               {"window", {{"p", cfg.window_p}, {"q", cfg.window_q}}},
                               {"windows", windows.size()}};
  if (!out_dir.empty()) {
    write_json_file(std::filesystem::path(out_dir) / "ingest.json", summary);
  }
  if (!export_features.empty()) {
    write_feature_matrix_csv(windows, export_features);
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
  const ExperimentConfig cfg = load_or_default(config_path);
  const std::filesystem::path base(out_dir);
  nlohmann::json datasets = nlohmann::json::array();
  for (int i = 0; i < cfg.synth.num_datasets; ++i) {
    const Corpus corpus = synth_generate_corpus(
        cfg.synth.users, cfg.synth.swipes_per_user, cfg.synth.profile_spread,
        mix_seed(seed, hash_tag("corpus"), static_cast<std::uint64_t>(i)),
        "synth" + std::to_string(i));
    const std::filesystem::path dir = base / corpus.dataset_id;
    std::filesystem::create_directories(dir);
    write_swipe_csv(corpus, dir / "swipes.csv");
    write_gender_csv(corpus, dir / "gender.csv");
    datasets.push_back(nlohmann::json{{"dataset_id", corpus.dataset_id},
                                      {"users", corpus.user_ids().size()},
                                      {"swipes", corpus.swipes.size()},
                                      {"swipes_csv", (dir / "swipes.csv").string()},
                                      {"gender_csv", (dir / "gender.csv").string()}});
  }
  const nlohmann::json summary{
      {"schema_version", kSchemaVersion}, {"seed", seed}, {"datasets", datasets}};
  write_json_file(base / "synth.json", summary);
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

ExperimentConfig apply_filters(ExperimentConfig cfg, const std::vector<std::uint64_t>& seeds,
                               const std::vector<std::string>& scenarios,
                               const std::vector<std::string>& archs,
                               const std::vector<std::string>& classifiers) {
  if (!seeds.empty()) cfg.seeds = seeds;
  if (!scenarios.empty()) {
    std::set<AttackScenario> keep;
    for (const auto& s : scenarios) keep.insert(scenario_from_string(s));
    std::vector<AttackScenario> filtered;
    for (AttackScenario s : cfg.scenarios) {
      if (keep.count(s)) filtered.push_back(s);
    }
    if (filtered.empty()) throw ConfigError("scenario filter excludes every configured scenario");
    cfg.scenarios = filtered;
  }
  if (!archs.empty()) {
    std::set<Architecture> keep;
    for (const auto& a : archs) keep.insert(architecture_from_string(a));
    std::vector<Architecture> filtered;
    for (Architecture a : cfg.architectures) {
      if (keep.count(a)) filtered.push_back(a);
    }
    if (filtered.empty()) {
      throw ConfigError("architecture filter excludes every configured architecture");
    }
    cfg.architectures = filtered;
  }
  if (!classifiers.empty()) {
    std::set<std::string> keep(classifiers.begin(), classifiers.end());
    std::vector<std::string> filtered;
    for (const auto& c : cfg.classifiers) {
      if (keep.count(c)) filtered.push_back(c);
    }
    if (filtered.empty()) throw ConfigError("classifier filter excludes every configured classifier");
    cfg.classifiers = filtered;
  }
  validate_config(cfg);
  return cfg;
}

int cmd_train(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
              const std::vector<std::string>& archs, const std::vector<std::string>& classifiers,
              const std::string& out_dir, bool quiet) {
  ExperimentConfig cfg = apply_filters(load_or_default(config_path), seeds, {}, archs, classifiers);
  cfg.scenarios.clear();  // training-only manifest
  cfg.persist_models = true;
  const ExperimentManifest manifest = run_experiment(cfg, stderr_progress(quiet));
  write_experiment_outputs(manifest, out_dir);
  std::cout << "trained " << manifest.models.size() << " models ("
            << manifest.failures.size() << " failures) -> " << out_dir << "\n";
  return manifest_exit_code(manifest);
}

int cmd_attack(const std::string& manifest_path, const std::vector<std::string>& scenarios,
               const std::string& out_dir, bool quiet) {
  const nlohmann::json mj = read_json_file(manifest_path);
  if (!mj.contains("config")) throw ConfigError("'" + manifest_path + "' is not a manifest");
  ExperimentConfig cfg = config_from_json(mj.at("config"));
  // Training-only manifests carry no scenario list; default to all of them.
  if (cfg.scenarios.empty()) cfg.scenarios = ExperimentConfig{}.scenarios;
  cfg = apply_filters(std::move(cfg), {}, scenarios, {}, {});

  const std::filesystem::path models_path =
      std::filesystem::path(manifest_path).parent_path() / "models.json";
  const nlohmann::json pj = read_json_file(models_path);
  std::vector<AuthModel> models;
  for (const auto& item : pj.at("models")) models.push_back(auth_model_from_json(item));
  if (models.empty()) throw DataError("'" + models_path.string() + "' holds no models");

  std::map<std::uint64_t, PreparedData> data_by_seed;
  const auto progress = stderr_progress(quiet);
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& model : models) {
    auto it = data_by_seed.find(model.seed);
    if (it == data_by_seed.end()) {
      if (progress) progress("seed " + std::to_string(model.seed) + ": preparing data");
      it = data_by_seed.emplace(model.seed, prepare_data(cfg, model.seed)).first;
    }
    for (const auto& outcome : run_attacks(model, it->second, cfg, model.seed)) {
      outcomes.push_back(outcome_to_json(outcome));
      if (progress) {
        progress("  " + model.model_id + " " + scenario_name(outcome.scenario) + ": far=" +
                 format_double(outcome.far));
      }
    }
  }
  write_json_file(std::filesystem::path(out_dir) / "attacks.json",
                  nlohmann::json{{"schema_version", kSchemaVersion}, {"outcomes", outcomes}});
  std::cout << "ran " << outcomes.size() << " attacks on " << models.size() << " models -> "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& attacks_path,
                 const std::string& out_dir) {
  const nlohmann::json mj = read_json_file(manifest_path);
  if (!mj.contains("config") || !mj.contains("models")) {
    throw ConfigError("'" + manifest_path + "' is not a manifest");
  }
  const ExperimentConfig cfg = config_from_json(mj.at("config"));
  std::vector<ModelSummary> summaries;
  for (const auto& item : mj.at("models")) summaries.push_back(model_summary_from_json(item));

  std::filesystem::path ap = attacks_path.empty()
                                 ? std::filesystem::path(manifest_path).parent_path() / "attacks.json"
                                 : std::filesystem::path(attacks_path);
  const nlohmann::json aj = read_json_file(ap);
  std::vector<AttackOutcome> outcomes;
  for (const auto& item : aj.at("outcomes")) outcomes.push_back(outcome_from_json(item));

  std::vector<AttackScenario> scenarios = cfg.scenarios;
  if (scenarios.empty()) {
    // Training-only manifests carry no scenario list; fall back to whatever
    // the attack stage produced.
    std::set<AttackScenario> seen;
    for (const auto& o : outcomes) seen.insert(o.scenario);
    scenarios.assign(seen.begin(), seen.end());
  }
  const std::vector<EvalReport> reports = assemble_reports(summaries, outcomes, scenarios);
  if (reports.empty()) throw DataError("no (model, scenario) pairs to evaluate");

  const std::filesystem::path base(out_dir);
  std::filesystem::create_directories(base);
  write_json_file(base / "reports.json", reports_to_json(reports));
  const auto cells = heatmap_cells(reports);
  write_heatmap_csv((base / "heatmap.csv").string(), cells);
  write_json_file(base / "heatmap.json", heatmap_to_json(cells));
  nlohmann::json fairness;
  try {
    fairness = fairness_to_json(fairness_by_group(reports));
  } catch (const Error& e) {
    fairness = nlohmann::json{{"schema_version", kSchemaVersion}, {"skipped", e.what()}};
  }
  write_json_file(base / "fairness.json", fairness);
  std::cout << "evaluated " << reports.size() << " reports -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
            const std::vector<std::string>& scenarios, const std::vector<std::string>& archs,
            const std::vector<std::string>& classifiers, const std::string& out_dir, bool quiet) {
  const ExperimentConfig cfg =
      apply_filters(load_or_default(config_path), seeds, scenarios, archs, classifiers);
  const ExperimentManifest manifest = run_experiment(cfg, stderr_progress(quiet));
  write_experiment_outputs(manifest, out_dir);
  std::cout << "run complete: " << manifest.models.size() << " models, "
            << manifest.reports.size() << " reports, " << manifest.failures.size()
            << " failures -> " << out_dir << "\n";
  return manifest_exit_code(manifest);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"touch-stroke continuous authentication toolkit"};
  app.set_version_flag("--version", std::string(touchauth::kToolkitVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  std::vector<std::string> scenario_filter;
  std::vector<std::string> arch_filter;
  std::vector<std::string> classifier_filter;
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* ingest = app.add_subcommand("ingest", "parse a swipe CSV and report corpus stats");
  std::string swipes_path;
  std::string gender_path;
  std::string export_features;
  ingest->add_option("swipes", swipes_path, "swipe CSV path")->required();
  ingest->add_option("gender", gender_path, "gender CSV path");
  ingest->add_option("--config", config_path, "config JSON (window parameters)");
  ingest->add_option("--out-dir", out_dir, "directory for ingest.json");
  ingest->add_option("--export-features", export_features, "write the window feature matrix CSV");

  auto* synth = app.add_subcommand("synth", "generate synthetic swipe corpora");
  std::uint64_t synth_seed = 42;
  synth->add_option("--config", config_path, "config JSON (synth block)");
  synth->add_option("--seed", synth_seed, "generation seed");
  synth->add_option("--out-dir", out_dir, "output directory");

  auto* train = app.add_subcommand("train", "train per-user models, persist them");
  train->add_option("--config", config_path, "config JSON");
  train->add_option("--seed", seeds, "override config seeds");
  train->add_option("--arch", arch_filter, "restrict architectures (V, G)");
  train->add_option("--classifier", classifier_filter, "restrict classifiers (mlp, rf)");
  train->add_option("--out-dir", out_dir, "output directory");

  auto* attack = app.add_subcommand("attack", "attack persisted models from a manifest");
  std::string manifest_path;
  attack->add_option("--config", manifest_path, "manifest.json from a train run")->required();
  attack->add_option("--scenario", scenario_filter,
                     "restrict scenarios (zero_same, zero_cross, population, random)");
  attack->add_option("--out-dir", out_dir, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "turn a manifest plus attacks into reports");
  std::string attacks_path;
  evaluate->add_option("--config", manifest_path, "manifest.json of the run")->required();
  evaluate->add_option("--attacks", attacks_path, "attacks.json (default: beside the manifest)");
  evaluate->add_option("--out-dir", out_dir, "output directory");

  auto* run = app.add_subcommand("run", "full experiment: data, train, attack, evaluate");
  run->add_option("--config", config_path, "config JSON");
  run->add_option("--seed", seeds, "override config seeds");
  run->add_option("--scenario", scenario_filter, "restrict scenarios");
  run->add_option("--arch", arch_filter, "restrict architectures");
  run->add_option("--classifier", classifier_filter, "restrict classifiers");
  run->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      return cmd_ingest(swipes_path, gender_path, config_path, out_dir, export_features);
    }
    if (synth->parsed()) return cmd_synth(config_path, synth_seed, out_dir);
    if (train->parsed()) {
      return cmd_train(config_path, seeds, arch_filter, classifier_filter, out_dir, quiet);
    }
    if (attack->parsed()) return cmd_attack(manifest_path, scenario_filter, out_dir, quiet);
    if (evaluate->parsed()) return cmd_evaluate(manifest_path, attacks_path, out_dir);
    if (run->parsed()) {
      return cmd_run(config_path, seeds, scenario_filter, arch_filter, classifier_filter, out_dir,
                     quiet);
    }
  } catch (const touchauth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const touchauth::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const touchauth::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
