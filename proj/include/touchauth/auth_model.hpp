#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/classifiers.hpp"
#include "touchauth/data_model.hpp"
#include "touchauth/dual_gan.hpp"
#include "touchauth/feature_engine.hpp"

namespace touchauth {

enum class Architecture { V, G };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

// "u003-rf-G-s42"
std::string make_model_id(const std::string& user_id, const std::string& classifier_kind,
                          Architecture arch, std::uint64_t seed);

// One user's trained verifier: raw window vectors pass normalize -> select ->
// score, and are accepted iff score >= threshold.
struct AuthModel {
  std::string model_id;
  std::string user_id;
  std::string dataset_id;
  Architecture architecture = Architecture::V;
  std::uint64_t seed = 0;
  Gender gender = Gender::unspecified;
  Normalizer normalizer;
  FeatureSelector selector;
  double threshold = 0.5;
  double frr = 0.0;  // measured on held-out genuine test windows at training time
  std::size_t n_genuine_test = 0;
  std::unique_ptr<Classifier> classifier;
  std::optional<GanPair> gan_pair;  // G architecture only

  std::size_t input_dim() const { return selector.selected_indices.size(); }
  std::string classifier_kind() const { return classifier ? classifier->name() : ""; }

  std::vector<double> model_input(const std::vector<double>& raw) const;
  double score_input(const std::vector<double>& input) const;
  double score_raw(const std::vector<double>& raw) const;
  bool accept_input(const std::vector<double>& input) const;
  bool accept_raw(const std::vector<double>& raw) const;
};

nlohmann::json auth_model_to_json(const AuthModel& model, bool include_gan = false);
AuthModel auth_model_from_json(const nlohmann::json& j);

}  // namespace touchauth
