#include "touchauth/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "touchauth/errors.hpp"
#include "touchauth/rng.hpp"
#include "touchauth/text_util.hpp"
#include "touchauth/version.hpp"

namespace touchauth {

namespace {

void require_known_keys(const nlohmann::json& j, const std::set<std::string>& known,
                        const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json corpora = nlohmann::json::array();
  for (const auto& src : cfg.corpora) {
    corpora.push_back(nlohmann::json{{"swipes", src.swipes_path}, {"gender", src.gender_path}});
  }
  std::vector<std::string> archs;
  for (Architecture a : cfg.architectures) archs.push_back(to_string(a));
  std::vector<std::string> scenarios;
  for (AttackScenario s : cfg.scenarios) scenarios.push_back(scenario_name(s));
  return nlohmann::json{
      {"corpora", corpora},
      {"synth",
       {{"num_datasets", cfg.synth.num_datasets},
        {"users", cfg.synth.users},
        {"swipes_per_user", cfg.synth.swipes_per_user},
        {"profile_spread", cfg.synth.profile_spread}}},
      {"train_fraction", cfg.train_fraction},
      {"window", {{"p", cfg.window_p}, {"q", cfg.window_q}}},
      {"classifiers", cfg.classifiers},
      {"architectures", archs},
      {"scenarios", scenarios},
      {"seeds", cfg.seeds},
      {"k_grid", cfg.k_grid},
      {"cv_folds", cfg.cv_folds},
      {"adasyn", {{"neighbors", cfg.adasyn_neighbors}, {"beta", cfg.adasyn_beta}}},
      {"gan",
       {{"epochs", cfg.gan.epochs},
        {"batch_size", cfg.gan.batch_size},
        {"lr", cfg.gan.lr},
        {"beta1", cfg.gan.beta1},
        {"beta2", cfg.gan.beta2},
        {"d_steps", cfg.gan.d_steps},
        {"noise_dim", cfg.gan.noise_dim},
        {"gen_hidden", cfg.gan.gen_hidden},
        {"disc_hidden", cfg.gan.disc_hidden},
        {"leak", cfg.gan.leak},
        {"impostor_cap", cfg.gan_impostor_cap}}},
      {"synth_count_candidates", cfg.synth_count_candidates},
      {"attack", {{"n_vectors", cfg.attack_vectors}}},
      {"impostor_train_cap", cfg.impostor_train_cap},
      {"rf",
       {{"trees", cfg.rf.trees},
        {"max_depth", cfg.rf.max_depth},
        {"min_leaf", cfg.rf.min_leaf},
        {"mtry", cfg.rf.mtry},
        {"bootstrap", cfg.rf.bootstrap}}},
      {"mlp",
       {{"hidden", cfg.mlp.hidden},
        {"epochs", cfg.mlp.epochs},
        {"batch", cfg.mlp.batch},
        {"lr", cfg.mlp.lr},
        {"leak", cfg.mlp.leak}}},
      {"persist_models", cfg.persist_models},
      {"persist_gans", cfg.persist_gans}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  require_known_keys(
      j,
      {"corpora", "synth", "train_fraction", "window", "classifiers", "architectures",
       "scenarios", "seeds", "k_grid", "cv_folds", "adasyn", "gan", "synth_count_candidates",
       "attack", "impostor_train_cap", "rf", "mlp", "persist_models", "persist_gans"},
      "config");
  ExperimentConfig cfg;
  if (j.contains("corpora")) {
    cfg.corpora.clear();
    for (const auto& item : j.at("corpora")) {
      require_known_keys(item, {"swipes", "gender"}, "corpora entry");
      CorpusSource src;
      src.swipes_path = item.at("swipes").get<std::string>();
      read_field(item, "gender", src.gender_path);
      cfg.corpora.push_back(std::move(src));
    }
  }
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    require_known_keys(s, {"num_datasets", "users", "swipes_per_user", "profile_spread"}, "synth");
    read_field(s, "num_datasets", cfg.synth.num_datasets);
    read_field(s, "users", cfg.synth.users);
    read_field(s, "swipes_per_user", cfg.synth.swipes_per_user);
    read_field(s, "profile_spread", cfg.synth.profile_spread);
  }
  read_field(j, "train_fraction", cfg.train_fraction);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    require_known_keys(w, {"p", "q"}, "window");
    read_field(w, "p", cfg.window_p);
    read_field(w, "q", cfg.window_q);
  }
  read_field(j, "classifiers", cfg.classifiers);
  if (j.contains("architectures")) {
    cfg.architectures.clear();
    for (const auto& a : j.at("architectures")) {
      cfg.architectures.push_back(architecture_from_string(a.get<std::string>()));
    }
  }
  if (j.contains("scenarios")) {
    cfg.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
      cfg.scenarios.push_back(scenario_from_string(s.get<std::string>()));
    }
  }
  read_field(j, "seeds", cfg.seeds);
  read_field(j, "k_grid", cfg.k_grid);
  read_field(j, "cv_folds", cfg.cv_folds);
  if (j.contains("adasyn")) {
    const auto& a = j.at("adasyn");
    require_known_keys(a, {"neighbors", "beta"}, "adasyn");
    read_field(a, "neighbors", cfg.adasyn_neighbors);
    read_field(a, "beta", cfg.adasyn_beta);
  }
  if (j.contains("gan")) {
    const auto& g = j.at("gan");
    require_known_keys(g,
                       {"epochs", "batch_size", "lr", "beta1", "beta2", "d_steps", "noise_dim",
                        "gen_hidden", "disc_hidden", "leak", "impostor_cap"},
                       "gan");
    read_field(g, "epochs", cfg.gan.epochs);
    read_field(g, "batch_size", cfg.gan.batch_size);
    read_field(g, "lr", cfg.gan.lr);
    read_field(g, "beta1", cfg.gan.beta1);
    read_field(g, "beta2", cfg.gan.beta2);
    read_field(g, "d_steps", cfg.gan.d_steps);
    read_field(g, "noise_dim", cfg.gan.noise_dim);
    read_field(g, "gen_hidden", cfg.gan.gen_hidden);
    read_field(g, "disc_hidden", cfg.gan.disc_hidden);
    read_field(g, "leak", cfg.gan.leak);
    read_field(g, "impostor_cap", cfg.gan_impostor_cap);
  }
  read_field(j, "synth_count_candidates", cfg.synth_count_candidates);
  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    require_known_keys(a, {"n_vectors"}, "attack");
    read_field(a, "n_vectors", cfg.attack_vectors);
  }
  read_field(j, "impostor_train_cap", cfg.impostor_train_cap);
  if (j.contains("rf")) {
    const auto& r = j.at("rf");
    require_known_keys(r, {"trees", "max_depth", "min_leaf", "mtry", "bootstrap"}, "rf");
    read_field(r, "trees", cfg.rf.trees);
    read_field(r, "max_depth", cfg.rf.max_depth);
    read_field(r, "min_leaf", cfg.rf.min_leaf);
    read_field(r, "mtry", cfg.rf.mtry);
    read_field(r, "bootstrap", cfg.rf.bootstrap);
  }
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    require_known_keys(m, {"hidden", "epochs", "batch", "lr", "leak"}, "mlp");
    read_field(m, "hidden", cfg.mlp.hidden);
    read_field(m, "epochs", cfg.mlp.epochs);
    read_field(m, "batch", cfg.mlp.batch);
    read_field(m, "lr", cfg.mlp.lr);
    read_field(m, "leak", cfg.mlp.leak);
  }
  read_field(j, "persist_models", cfg.persist_models);
  read_field(j, "persist_gans", cfg.persist_gans);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config")) return config_from_json(j.at("config"));
  return config_from_json(j);
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0,1)");
  }
  if (cfg.window_p < 1 || cfg.window_q < 1) throw ConfigError("window p and q must be >= 1");
  if (cfg.classifiers.empty()) throw ConfigError("at least one classifier required");
  for (const auto& c : cfg.classifiers) {
    if (c != "mlp" && c != "rf") throw ConfigError("unknown classifier '" + c + "'");
  }
  if (cfg.architectures.empty()) throw ConfigError("at least one architecture required");
  if (cfg.seeds.empty()) throw ConfigError("at least one seed required");
  if (cfg.k_grid.empty()) throw ConfigError("k_grid must not be empty");
  if (cfg.cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
  if (cfg.adasyn_neighbors < 1) throw ConfigError("adasyn neighbors must be >= 1");
  if (!(cfg.adasyn_beta > 0.0) || cfg.adasyn_beta > 1.0) {
    throw ConfigError("adasyn beta must lie in (0,1]");
  }
  if (cfg.synth_count_candidates.empty()) {
    throw ConfigError("synth_count_candidates must not be empty");
  }
  if (cfg.attack_vectors < 1) throw ConfigError("attack n_vectors must be >= 1");
  const bool needs_external =
      std::any_of(cfg.scenarios.begin(), cfg.scenarios.end(), [](AttackScenario s) {
        return s == AttackScenario::zero_effort_cross || s == AttackScenario::population;
      });
  const std::size_t n_datasets =
      cfg.corpora.empty() ? static_cast<std::size_t>(cfg.synth.num_datasets) : cfg.corpora.size();
  if (n_datasets < 1) throw ConfigError("at least one dataset required");
  if (needs_external && n_datasets < 2) {
    throw ConfigError("cross-dataset and population scenarios need >= 2 datasets");
  }
  if (cfg.corpora.empty()) {
    if (cfg.synth.users < 2) throw ConfigError("synthetic corpora need >= 2 users");
    if (cfg.synth.swipes_per_user < 2) throw ConfigError("synth swipes_per_user must be >= 2");
  }
}

namespace {

bool is_genuine_label(WindowLabel label) {
  return label == WindowLabel::genuine || label == WindowLabel::synthetic_genuine;
}

std::vector<WindowVector> user_windows(const std::vector<const SwipeGesture*>& swipes, int p,
                                       int q, std::size_t* skipped) {
  std::vector<FeatureVector> feats;
  feats.reserve(swipes.size());
  for (const SwipeGesture* s : swipes) {
    try {
      feats.push_back(extract_features(*s));
    } catch (const DegenerateSwipeError&) {
      if (skipped) ++*skipped;
    }
  }
  return build_windows(feats, p, q);
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, std::uint64_t seed) {
  PreparedData data;
  if (cfg.corpora.empty()) {
    for (int i = 0; i < cfg.synth.num_datasets; ++i) {
      data.corpora.push_back(synth_generate_corpus(
          cfg.synth.users, cfg.synth.swipes_per_user, cfg.synth.profile_spread,
          mix_seed(seed, hash_tag("corpus"), static_cast<std::uint64_t>(i)),
          "synth" + std::to_string(i)));
    }
  } else {
    for (const auto& src : cfg.corpora) {
      Corpus corpus = parse_swipe_csv(src.swipes_path);
      if (!src.gender_path.empty()) {
        for (const auto& [user, gender] : parse_gender_csv(src.gender_path)) {
          corpus.user_metadata[user].gender = gender;
        }
      }
      data.corpora.push_back(std::move(corpus));
    }
  }
  for (auto& corpus : data.corpora) corpus = filter_short_swipes(corpus);
  for (std::size_t i = 0; i < data.corpora.size(); ++i) {
    for (std::size_t k = i + 1; k < data.corpora.size(); ++k) {
      if (data.corpora[i].dataset_id == data.corpora[k].dataset_id) {
        throw DataError("duplicate dataset id '" + data.corpora[i].dataset_id + "'");
      }
    }
  }

  const Corpus& primary = data.corpora.front();
  data.split = split_train_test(primary, cfg.train_fraction, seed);

  data.primary_test_pool.dataset_id = primary.dataset_id;
  for (const auto& user : primary.user_ids()) {
    const auto& assignment = data.split.per_user.at(user);
    const std::set<std::string> train_ids(assignment.train_ids.begin(),
                                          assignment.train_ids.end());
    std::vector<const SwipeGesture*> train_swipes;
    std::vector<const SwipeGesture*> test_swipes;
    for (const auto& swipe : primary.swipes) {
      if (swipe.user_id != user) continue;
      (train_ids.count(swipe.swipe_id) ? train_swipes : test_swipes).push_back(&swipe);
    }
    data.train_windows[user] =
        user_windows(train_swipes, cfg.window_p, cfg.window_q, &data.swipes_skipped_degenerate);
    data.test_windows[user] =
        user_windows(test_swipes, cfg.window_p, cfg.window_q, &data.swipes_skipped_degenerate);
    const auto& test = data.test_windows[user];
    data.primary_test_pool.windows.insert(data.primary_test_pool.windows.end(), test.begin(),
                                          test.end());
  }

  for (std::size_t i = 1; i < data.corpora.size(); ++i) {
    const Corpus& corpus = data.corpora[i];
    WindowSet pool;
    pool.dataset_id = corpus.dataset_id;
    for (const auto& user : corpus.user_ids()) {
      std::vector<const SwipeGesture*> swipes;
      for (const auto& swipe : corpus.swipes) {
        if (swipe.user_id == user) swipes.push_back(&swipe);
      }
      auto windows =
          user_windows(swipes, cfg.window_p, cfg.window_q, &data.swipes_skipped_degenerate);
      pool.windows.insert(pool.windows.end(), windows.begin(), windows.end());
    }
    data.external_pools.push_back(std::move(pool));
  }
  return data;
}

namespace {

struct LabeledSet {
  std::vector<std::vector<double>> X;
  std::vector<int> y;
};

LabeledSet to_xy(const std::vector<WindowVector>& windows) {
  LabeledSet set;
  set.X.reserve(windows.size());
  set.y.reserve(windows.size());
  for (const auto& w : windows) {
    set.X.push_back(w.values);
    set.y.push_back(is_genuine_label(w.label) ? 1 : 0);
  }
  return set;
}

std::unique_ptr<Classifier> make_classifier(const ExperimentConfig& cfg, const std::string& kind,
                                            std::uint64_t seed) {
  if (kind == "rf") {
    RfConfig c = cfg.rf;
    c.seed = seed;
    return std::make_unique<RandomForestClassifier>(c);
  }
  if (kind == "mlp") {
    MlpConfig c = cfg.mlp;
    c.seed = seed;
    return std::make_unique<MlpClassifier>(c);
  }
  throw ConfigError("unknown classifier '" + kind + "'");
}

struct PooledCvScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
  double mean_eer = 0.0;
};

// Per fold: real fold-train + extras (GAN synthetics) are ADASYN-balanced and
// a fresh classifier is trained; the held-out real windows are scored.
PooledCvScores pooled_cv_scores(const std::vector<WindowVector>& real, const CvPlan& plan,
                                const std::vector<WindowVector>& extras,
                                const ExperimentConfig& cfg, const std::string& kind,
                                std::uint64_t stream_seed) {
  PooledCvScores out;
  double eer_sum = 0.0;
  for (int fold = 0; fold < plan.folds; ++fold) {
    std::vector<WindowVector> train_set;
    std::vector<const WindowVector*> val_set;
    for (std::size_t i = 0; i < real.size(); ++i) {
      if (plan.assignment[i] == fold) {
        val_set.push_back(&real[i]);
      } else {
        train_set.push_back(real[i]);
      }
    }
    train_set.insert(train_set.end(), extras.begin(), extras.end());
    AdasynConfig acfg{cfg.adasyn_neighbors, cfg.adasyn_beta,
                      mix_seed(stream_seed, hash_tag("adasyn"), static_cast<std::uint64_t>(fold))};
    const auto balanced = adasyn_balance(train_set, acfg);
    const auto xy = to_xy(balanced.windows);
    auto clf = make_classifier(cfg, kind,
                               mix_seed(stream_seed, hash_tag("clf"), static_cast<std::uint64_t>(fold)));
    clf->train(xy.X, xy.y);
    std::vector<double> fold_genuine;
    std::vector<double> fold_impostor;
    for (const WindowVector* w : val_set) {
      const double s = clf->score(w->values);
      (is_genuine_label(w->label) ? fold_genuine : fold_impostor).push_back(s);
    }
    eer_sum += select_threshold_eer(fold_genuine, fold_impostor).eer;
    out.genuine.insert(out.genuine.end(), fold_genuine.begin(), fold_genuine.end());
    out.impostor.insert(out.impostor.end(), fold_impostor.begin(), fold_impostor.end());
  }
  out.mean_eer = eer_sum / static_cast<double>(plan.folds);
  return out;
}

std::vector<WindowVector> project_all(const FeatureSelector& selector,
                                      const std::vector<WindowVector>& windows) {
  std::vector<WindowVector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(selector.apply(w));
  return out;
}

template <class T>
std::vector<T> subsample(std::vector<T> items, std::size_t cap, std::uint64_t seed) {
  if (cap == 0 || items.size() <= cap) return items;
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(cap);
  for (std::size_t i : idx) out.push_back(std::move(items[i]));
  return out;
}

}  // namespace

std::vector<TrainedModel> train_user_models(const std::string& user_id, const PreparedData& data,
                                            const ExperimentConfig& cfg,
                                            const std::string& classifier_kind,
                                            std::uint64_t seed) {
  const auto train_it = data.train_windows.find(user_id);
  if (train_it == data.train_windows.end() || train_it->second.empty()) {
    throw InsufficientGenuineDataError("user '" + user_id + "' has no training windows");
  }
  const auto test_it = data.test_windows.find(user_id);
  if (test_it == data.test_windows.end() || test_it->second.empty()) {
    throw InsufficientGenuineDataError("user '" + user_id + "' has no test windows");
  }
  const std::uint64_t user_seed = mix_seed(seed, hash_tag(user_id), hash_tag(classifier_kind));

  std::vector<WindowVector> train_raw = train_it->second;
  for (auto& w : train_raw) w.label = WindowLabel::genuine;
  const std::size_t n_genuine = train_raw.size();
  {
    std::vector<WindowVector> impostors;
    for (const auto& [other, windows] : data.train_windows) {
      if (other == user_id) continue;
      for (const auto& w : windows) {
        impostors.push_back(w);
        impostors.back().label = WindowLabel::impostor;
      }
    }
    if (impostors.empty()) throw DataError("training needs at least one other user");
    impostors = subsample(std::move(impostors),
                          cfg.impostor_train_cap > 0
                              ? static_cast<std::size_t>(cfg.impostor_train_cap)
                              : std::size_t{0},
                          mix_seed(user_seed, hash_tag("impostor-cap")));
    train_raw.insert(train_raw.end(), std::make_move_iterator(impostors.begin()),
                     std::make_move_iterator(impostors.end()));
  }
  const std::size_t n_impostor = train_raw.size() - n_genuine;

  const Normalizer normalizer = fit_normalizer(train_raw);
  std::vector<WindowVector> norm_train;
  norm_train.reserve(train_raw.size());
  for (const auto& w : train_raw) norm_train.push_back(apply_normalizer(normalizer, w));
  std::vector<int> labels;
  labels.reserve(norm_train.size());
  for (const auto& w : norm_train) labels.push_back(is_genuine_label(w.label) ? 1 : 0);

  const CvPlan selection_plan =
      make_cv_plan(labels, cfg.cv_folds, mix_seed(user_seed, hash_tag("selection-cv")));
  const FeatureSelector selector =
      select_features(norm_train, labels, cfg.k_grid, [&](const std::vector<int>& dims) {
        FeatureSelector candidate;
        candidate.selected_indices = dims;
        const auto projected = project_all(candidate, norm_train);
        return pooled_cv_scores(projected, selection_plan, {}, cfg, classifier_kind,
                                mix_seed(user_seed, hash_tag("selection"), dims.size()))
            .mean_eer;
      });
  const auto sel_train = project_all(selector, norm_train);

  const CvPlan threshold_plan =
      make_cv_plan(labels, cfg.cv_folds, mix_seed(user_seed, hash_tag("threshold-cv")));

  const bool wants_g = std::find(cfg.architectures.begin(), cfg.architectures.end(),
                                 Architecture::G) != cfg.architectures.end();
  std::optional<GanPair> gan_pair;
  std::vector<WindowVector> gan_extras;
  int synth_count = 0;
  if (wants_g) {
    std::vector<std::vector<double>> genuine_rows;
    std::vector<std::vector<double>> impostor_rows;
    for (const auto& w : sel_train) {
      (is_genuine_label(w.label) ? genuine_rows : impostor_rows).push_back(w.values);
    }
    impostor_rows = subsample(std::move(impostor_rows),
                              cfg.gan_impostor_cap > 0
                                  ? static_cast<std::size_t>(cfg.gan_impostor_cap)
                                  : std::size_t{0},
                              mix_seed(user_seed, hash_tag("gan-impostor-cap")));
    GanTrainConfig gcfg = cfg.gan;
    gcfg.seed = mix_seed(user_seed, hash_tag("gan-genuine"));
    GanPair pair;
    pair.genuine = train_gan(genuine_rows, gcfg);
    gcfg.seed = mix_seed(user_seed, hash_tag("gan-impostor"));
    pair.impostor = train_gan(impostor_rows, gcfg);

    const auto synth_for = [&](int count, std::uint64_t tag) {
      auto genuine = generate_samples(pair.genuine.generator, cfg.gan.noise_dim,
                                      static_cast<std::size_t>(count),
                                      mix_seed(user_seed, hash_tag("synth-genuine"), tag),
                                      WindowLabel::synthetic_genuine);
      for (auto& w : genuine) w.user_id = user_id;
      auto impostor = generate_samples(pair.impostor.generator, cfg.gan.noise_dim,
                                       static_cast<std::size_t>(count),
                                       mix_seed(user_seed, hash_tag("synth-impostor"), tag),
                                       WindowLabel::synthetic_impostor);
      genuine.insert(genuine.end(), std::make_move_iterator(impostor.begin()),
                     std::make_move_iterator(impostor.end()));
      return genuine;
    };
    synth_count = tune_synth_count(cfg.synth_count_candidates, [&](int count) {
      const auto extras = synth_for(count, static_cast<std::uint64_t>(count));
      return pooled_cv_scores(sel_train, threshold_plan, extras, cfg, classifier_kind,
                              mix_seed(user_seed, hash_tag("tune-cv"),
                                       static_cast<std::uint64_t>(count)))
          .mean_eer;
    });
    gan_extras = synth_for(synth_count, 0);
    gan_pair = std::move(pair);
  }

  const Gender gender = [&] {
    const auto& meta = data.corpora.front().user_metadata;
    const auto it = meta.find(user_id);
    return it == meta.end() ? Gender::unspecified : it->second.gender;
  }();

  std::vector<TrainedModel> out;
  for (Architecture arch : cfg.architectures) {
    const bool is_g = arch == Architecture::G;
    const std::string arch_tag = is_g ? "G" : "V";
    static const std::vector<WindowVector> kNoExtras;
    const std::vector<WindowVector>& extras = is_g ? gan_extras : kNoExtras;
    const auto cv = pooled_cv_scores(sel_train, threshold_plan, extras, cfg, classifier_kind,
                                     mix_seed(user_seed, hash_tag("threshold"), hash_tag(arch_tag)));
    const ThresholdResult thr = select_threshold_eer(cv.genuine, cv.impostor);

    std::vector<WindowVector> final_set = sel_train;
    final_set.insert(final_set.end(), extras.begin(), extras.end());
    AdasynConfig acfg{cfg.adasyn_neighbors, cfg.adasyn_beta,
                      mix_seed(user_seed, hash_tag("adasyn-final"), hash_tag(arch_tag))};
    const auto balanced = adasyn_balance(final_set, acfg);
    const auto xy = to_xy(balanced.windows);
    auto clf = make_classifier(cfg, classifier_kind,
                               mix_seed(user_seed, hash_tag("clf-final"), hash_tag(arch_tag)));
    clf->train(xy.X, xy.y);

    TrainedModel tm;
    tm.model.user_id = user_id;
    tm.model.dataset_id = data.corpora.front().dataset_id;
    tm.model.architecture = arch;
    tm.model.seed = seed;
    tm.model.gender = gender;
    tm.model.normalizer = normalizer;
    tm.model.selector = selector;
    tm.model.threshold = thr.tau;
    tm.model.classifier = std::move(clf);
    tm.model.model_id = make_model_id(user_id, classifier_kind, arch, seed);
    if (is_g) tm.model.gan_pair = gan_pair;

    std::size_t rejects = 0;
    for (const auto& w : test_it->second) {
      if (!tm.model.accept_raw(w.values)) ++rejects;
    }
    tm.model.n_genuine_test = test_it->second.size();
    tm.model.frr = static_cast<double>(rejects) / static_cast<double>(test_it->second.size());

    tm.train_eer = thr.eer;
    tm.n_train_genuine = n_genuine;
    tm.n_train_impostor = n_impostor;
    tm.synth_count = is_g ? synth_count : 0;
    out.push_back(std::move(tm));
  }
  return out;
}

AuthModel train_user_model(const std::string& user_id, const PreparedData& data,
                           const ExperimentConfig& cfg, const std::string& classifier_kind,
                           Architecture architecture, std::uint64_t seed) {
  ExperimentConfig single = cfg;
  single.architectures = {architecture};
  auto models = train_user_models(user_id, data, single, classifier_kind, seed);
  return std::move(models.front().model);
}

std::vector<AttackOutcome> run_attacks(const AuthModel& model, const PreparedData& data,
                                       const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<AttackOutcome> out;
  std::vector<const WindowSet*> externals;
  externals.reserve(data.external_pools.size());
  for (const auto& pool : data.external_pools) externals.push_back(&pool);

  for (AttackScenario scenario : cfg.scenarios) {
    switch (scenario) {
      case AttackScenario::zero_effort_same:
        out.push_back(zero_effort_attack(model, data.primary_test_pool));
        break;
      case AttackScenario::zero_effort_cross:
        for (const WindowSet* set : externals) out.push_back(zero_effort_attack(model, *set));
        break;
      case AttackScenario::population: {
        const PopulationStats stats = population_stats(externals, model);
        out.push_back(population_attack(
            model, stats, static_cast<std::size_t>(cfg.attack_vectors),
            mix_seed(seed, hash_tag("population"), hash_tag(model.model_id))));
        break;
      }
      case AttackScenario::random_vector:
        out.push_back(random_vector_attack(
            model, model.input_dim(), static_cast<std::size_t>(cfg.attack_vectors),
            mix_seed(seed, hash_tag("random"), hash_tag(model.model_id))));
        break;
    }
  }
  return out;
}

nlohmann::json model_summary_to_json(const ModelSummary& m) {
  return nlohmann::json{{"model_id", m.model_id},
                        {"user_id", m.user_id},
                        {"dataset_id", m.dataset_id},
                        {"classifier", m.classifier},
                        {"architecture", m.architecture},
                        {"seed", m.seed},
                        {"gender", to_string(m.gender)},
                        {"threshold", m.threshold},
                        {"train_eer", m.train_eer},
                        {"frr", m.frr},
                        {"n_genuine_test", m.n_genuine_test},
                        {"selected_dims", m.selected_dims},
                        {"n_train_genuine", m.n_train_genuine},
                        {"n_train_impostor", m.n_train_impostor},
                        {"synth_count", m.synth_count}};
}

ModelSummary model_summary_from_json(const nlohmann::json& j) {
  ModelSummary m;
  m.model_id = j.at("model_id").get<std::string>();
  m.user_id = j.at("user_id").get<std::string>();
  m.dataset_id = j.at("dataset_id").get<std::string>();
  m.classifier = j.at("classifier").get<std::string>();
  m.architecture = j.at("architecture").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.gender = gender_from_string(j.at("gender").get<std::string>());
  m.threshold = j.at("threshold").get<double>();
  m.train_eer = j.at("train_eer").get<double>();
  m.frr = j.at("frr").get<double>();
  m.n_genuine_test = j.at("n_genuine_test").get<std::size_t>();
  m.selected_dims = j.at("selected_dims").get<std::size_t>();
  m.n_train_genuine = j.at("n_train_genuine").get<std::size_t>();
  m.n_train_impostor = j.at("n_train_impostor").get<std::size_t>();
  m.synth_count = j.at("synth_count").get<int>();
  return m;
}

std::vector<EvalReport> assemble_reports(const std::vector<ModelSummary>& models,
                                         const std::vector<AttackOutcome>& outcomes,
                                         const std::vector<AttackScenario>& scenarios) {
  std::map<std::pair<std::string, AttackScenario>, std::vector<const AttackOutcome*>> index;
  for (const auto& o : outcomes) index[{o.model_id, o.scenario}].push_back(&o);

  std::vector<EvalReport> reports;
  for (const auto& m : models) {
    for (AttackScenario scenario : scenarios) {
      const auto it = index.find({m.model_id, scenario});
      if (it == index.end()) continue;
      std::size_t accepted = 0;
      std::size_t total = 0;
      std::set<std::string> sources;
      for (const AttackOutcome* o : it->second) {
        accepted += o->accepted;
        total += o->total;
        if (!o->dataset_id.empty()) sources.insert(o->dataset_id);
      }
      EvalReport r;
      r.model_id = m.model_id;
      r.classifier = m.classifier;
      r.architecture = m.architecture;
      r.scenario = scenario_name(scenario);
      r.rates.far = static_cast<double>(accepted) / static_cast<double>(total);
      r.rates.frr = m.frr;
      r.rates.hter = (r.rates.far + r.rates.frr) / 2.0;
      r.gender = m.gender;
      r.dataset_ids.push_back(m.dataset_id);
      for (const auto& s : sources) {
        if (s != m.dataset_id) r.dataset_ids.push_back(s);
      }
      r.seed = m.seed;
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

namespace {

// FNV-1a over canonical stage payloads for audit hashes.
class StageHasher {
 public:
  void update(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void update_double(double v) { update(format_double(v)); }
  std::string hex() const {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h_));
    return std::string(buf);
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

void hash_corpus(StageHasher& hasher, const Corpus& corpus) {
  hasher.update(corpus.dataset_id);
  for (const auto& swipe : corpus.swipes) {
    hasher.update(swipe.user_id);
    hasher.update(swipe.swipe_id);
    for (const auto& e : swipe.events) {
      hasher.update_double(e.t_ms);
      hasher.update_double(e.x);
      hasher.update_double(e.y);
      hasher.update_double(e.major_axis);
      hasher.update_double(e.minor_axis);
    }
  }
}

void hash_windows(StageHasher& hasher, const std::map<std::string, std::vector<WindowVector>>& by_user) {
  for (const auto& [user, windows] : by_user) {
    hasher.update(user);
    for (const auto& w : windows) {
      for (double v : w.values) hasher.update_double(v);
    }
  }
}

}  // namespace

ExperimentManifest run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentManifest manifest;
  manifest.config = cfg;

  StageHasher corpus_hash;
  StageHasher window_hash;
  StageHasher model_hash;
  StageHasher attack_hash;

  for (std::uint64_t seed : cfg.seeds) {
    if (progress) progress("seed " + std::to_string(seed) + ": preparing data");
    const PreparedData data = prepare_data(cfg, seed);
    for (const auto& corpus : data.corpora) hash_corpus(corpus_hash, corpus);
    hash_windows(window_hash, data.train_windows);
    hash_windows(window_hash, data.test_windows);

    const auto users = data.corpora.front().user_ids();
    for (const auto& user : users) {
      for (const auto& kind : cfg.classifiers) {
        const std::string cell = user + "-" + kind + "-s" + std::to_string(seed);
        try {
          auto trained = train_user_models(user, data, cfg, kind, seed);
          for (auto& tm : trained) {
            const auto outcomes = run_attacks(tm.model, data, cfg, seed);
            manifest.outcomes.insert(manifest.outcomes.end(), outcomes.begin(), outcomes.end());

            ModelSummary summary;
            summary.model_id = tm.model.model_id;
            summary.user_id = tm.model.user_id;
            summary.dataset_id = tm.model.dataset_id;
            summary.classifier = kind;
            summary.architecture = to_string(tm.model.architecture);
            summary.seed = seed;
            summary.gender = tm.model.gender;
            summary.threshold = tm.model.threshold;
            summary.train_eer = tm.train_eer;
            summary.frr = tm.model.frr;
            summary.n_genuine_test = tm.model.n_genuine_test;
            summary.selected_dims = tm.model.input_dim();
            summary.n_train_genuine = tm.n_train_genuine;
            summary.n_train_impostor = tm.n_train_impostor;
            summary.synth_count = tm.synth_count;
            manifest.models.push_back(summary);

            model_hash.update(summary.model_id);
            model_hash.update_double(summary.threshold);
            model_hash.update_double(summary.frr);
            for (const auto& o : outcomes) {
              attack_hash.update(o.model_id);
              attack_hash.update(scenario_name(o.scenario));
              attack_hash.update(o.dataset_id);
              attack_hash.update(std::to_string(o.accepted));
              attack_hash.update(std::to_string(o.total));
            }
            if (cfg.persist_models) {
              manifest.persisted_models.push_back(
                  auth_model_to_json(tm.model, cfg.persist_gans));
            }
            if (progress) {
              progress("  " + summary.model_id + ": tau=" + format_double(summary.threshold) +
                       " frr=" + format_double(summary.frr));
            }
          }
        } catch (const std::exception& e) {
          manifest.failures.push_back({cell, e.what()});
          if (progress) progress("  " + cell + " FAILED: " + e.what());
        }
      }
    }
  }

  manifest.reports = assemble_reports(manifest.models, manifest.outcomes, cfg.scenarios);
  StageHasher report_hash;
  report_hash.update(reports_to_json(manifest.reports).dump());

  manifest.stage_hashes = {{"corpus", corpus_hash.hex()},
                           {"windows", window_hash.hex()},
                           {"models", model_hash.hex()},
                           {"attacks", attack_hash.hex()},
                           {"reports", report_hash.hex()}};
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return manifest;
}

nlohmann::json manifest_to_json(const ExperimentManifest& m) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& s : m.models) models.push_back(model_summary_to_json(s));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : m.failures) {
    failures.push_back(nlohmann::json{{"cell", f.cell}, {"error", f.error}});
  }
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& [name, hash] : m.stage_hashes) {
    stages.push_back(nlohmann::json{{"name", name}, {"hash", hash}});
  }
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"toolkit_version", kToolkitVersion},
                        {"config", config_to_json(m.config)},
                        {"stages", stages},
                        {"models", models},
                        {"failures", failures},
                        {"n_reports", m.reports.size()},
                        {"artifacts",
                         {{"reports", "reports.json"},
                          {"attacks", "attacks.json"},
                          {"heatmap_csv", "heatmap.csv"},
                          {"heatmap_json", "heatmap.json"},
                          {"fairness", "fairness.json"},
                          {"models", m.persisted_models.empty() ? "" : "models.json"}}},
                        {"wall_clock_seconds", m.wall_clock_seconds}};
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void write_experiment_outputs(const ExperimentManifest& m, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "reports.json", reports_to_json(m.reports).dump(2) + "\n");

  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : m.outcomes) outcomes.push_back(outcome_to_json(o));
  write_text(out_dir / "attacks.json",
             nlohmann::json{{"schema_version", kSchemaVersion}, {"outcomes", outcomes}}.dump(2) +
                 "\n");

  if (!m.reports.empty()) {
    const auto cells = heatmap_cells(m.reports);
    write_heatmap_csv((out_dir / "heatmap.csv").string(), cells);
    write_text(out_dir / "heatmap.json", heatmap_to_json(cells).dump(2) + "\n");
  } else {
    write_text(out_dir / "heatmap.csv", "classifier,architecture,scenario,metric,value,n_models\n");
    write_text(out_dir / "heatmap.json",
               nlohmann::json{{"schema_version", kSchemaVersion},
                              {"cells", nlohmann::json::array()}}
                       .dump(2) +
                   "\n");
  }

  nlohmann::json fairness;
  try {
    fairness = fairness_to_json(fairness_by_group(m.reports));
  } catch (const Error& e) {
    fairness = nlohmann::json{{"schema_version", kSchemaVersion}, {"skipped", e.what()}};
  }
  write_text(out_dir / "fairness.json", fairness.dump(2) + "\n");

  if (!m.persisted_models.empty()) {
    write_text(out_dir / "models.json",
               nlohmann::json{{"schema_version", kSchemaVersion},
                              {"models", m.persisted_models}}
                       .dump(2) +
                   "\n");
  }
  write_text(out_dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

}  // namespace touchauth
