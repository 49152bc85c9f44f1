#include "touchauth/auth_model.hpp"

#include "touchauth/errors.hpp"

namespace touchauth {

std::string to_string(Architecture a) { return a == Architecture::V ? "V" : "G"; }

Architecture architecture_from_string(const std::string& s) {
  if (s == "V") return Architecture::V;
  if (s == "G") return Architecture::G;
  throw ConfigError("unknown architecture '" + s + "' (expected V or G)");
}

std::string make_model_id(const std::string& user_id, const std::string& classifier_kind,
                          Architecture arch, std::uint64_t seed) {
  return user_id + "-" + classifier_kind + "-" + to_string(arch) + "-s" + std::to_string(seed);
}

std::vector<double> AuthModel::model_input(const std::vector<double>& raw) const {
  return selector.apply(normalizer.apply(raw));
}

double AuthModel::score_input(const std::vector<double>& input) const {
  if (!classifier) throw Error("auth model has no classifier");
  if (input.size() != input_dim()) throw DimensionMismatchError("model input size mismatch");
  return classifier->score(input);
}

double AuthModel::score_raw(const std::vector<double>& raw) const {
  return score_input(model_input(raw));
}

bool AuthModel::accept_input(const std::vector<double>& input) const {
  return score_input(input) >= threshold;
}

bool AuthModel::accept_raw(const std::vector<double>& raw) const {
  return score_raw(raw) >= threshold;
}

nlohmann::json auth_model_to_json(const AuthModel& model, bool include_gan) {
  if (!model.classifier) throw Error("auth model has no classifier");
  nlohmann::json j{{"schema_version", 1},
                   {"model_id", model.model_id},
                   {"user_id", model.user_id},
                   {"dataset_id", model.dataset_id},
                   {"architecture", to_string(model.architecture)},
                   {"seed", model.seed},
                   {"gender", to_string(model.gender)},
                   {"normalizer", {{"min", model.normalizer.min}, {"max", model.normalizer.max}}},
                   {"selector",
                    {{"selected_indices", model.selector.selected_indices},
                     {"mi_scores", model.selector.mi_scores}}},
                   {"threshold", model.threshold},
                   {"frr", model.frr},
                   {"n_genuine_test", model.n_genuine_test},
                   {"classifier", model.classifier->to_json()}};
  if (include_gan && model.gan_pair.has_value()) j["gan_pair"] = model.gan_pair->to_json();
  return j;
}

AuthModel auth_model_from_json(const nlohmann::json& j) {
  AuthModel model;
  model.model_id = j.at("model_id").get<std::string>();
  model.user_id = j.at("user_id").get<std::string>();
  model.dataset_id = j.at("dataset_id").get<std::string>();
  model.architecture = architecture_from_string(j.at("architecture").get<std::string>());
  model.seed = j.at("seed").get<std::uint64_t>();
  model.gender = gender_from_string(j.at("gender").get<std::string>());
  model.normalizer.min = j.at("normalizer").at("min").get<std::vector<double>>();
  model.normalizer.max = j.at("normalizer").at("max").get<std::vector<double>>();
  model.selector.selected_indices = j.at("selector").at("selected_indices").get<std::vector<int>>();
  model.selector.mi_scores = j.at("selector").at("mi_scores").get<std::vector<double>>();
  model.threshold = j.at("threshold").get<double>();
  model.frr = j.at("frr").get<double>();
  model.n_genuine_test = j.at("n_genuine_test").get<std::size_t>();
  model.classifier = classifier_from_json(j.at("classifier"));
  if (j.contains("gan_pair")) model.gan_pair = GanPair::from_json(j.at("gan_pair"));
  return model;
}

}  // namespace touchauth
