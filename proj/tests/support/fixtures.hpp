#pragma once

// Shared fixtures for the unit and acceptance suites: seeded random swipes,
// hand-built single-stump auth models, and separable training blobs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/auth_model.hpp"
#include "touchauth/classifiers.hpp"
#include "touchauth/data_model.hpp"
#include "touchauth/feature_engine.hpp"

namespace fixtures {

// Random swipe with strictly positive total duration. Roughly 15% of the
// segments get a zero time delta and 10% of the swipes a perfectly vertical
// chord, so the degenerate-branch conventions stay exercised.
inline touchauth::SwipeGesture random_swipe(std::mt19937_64& eng, int min_n = 6, int max_n = 80) {
  std::uniform_int_distribution<int> n_dist(min_n, max_n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = n_dist(eng);

  touchauth::SwipeGesture swipe;
  swipe.user_id = "test";
  swipe.swipe_id = "fixture";
  double t = u(eng) * 1000.0;
  double x = 100.0 + u(eng) * 800.0;
  double y = 100.0 + u(eng) * 1600.0;
  for (int i = 0; i < n; ++i) {
    touchauth::TouchEvent e;
    e.t_ms = t;
    e.x = x;
    e.y = y;
    e.major_axis = 1.0 + u(eng) * 11.0;
    e.minor_axis = 1.0 + u(eng) * (e.major_axis - 1.0);
    swipe.events.push_back(e);
    const bool zero_dt = i > 0 && i + 1 < n && u(eng) < 0.15;
    t += zero_dt ? 0.0 : 0.5 + u(eng) * 29.5;
    x += (u(eng) - 0.5) * 80.0;
    y += (u(eng) - 0.5) * 80.0;
  }
  if (u(eng) < 0.10) swipe.events.back().x = swipe.events.front().x;  // vertical chord
  return swipe;
}

// Auth model whose classifier is a single decision stump on one input
// dimension: score 1 when x[feature] <= threshold (if accept_left), else 0.
// Normalizer is the identity on [0,1]^dim and the selector keeps every
// dimension, so raw inputs pass through unchanged.
inline touchauth::AuthModel make_stump_model(std::size_t dim, int feature, double split,
                                             bool accept_left,
                                             const std::string& user_id = "u000",
                                             const std::string& dataset_id = "primary") {
  using nlohmann::json;
  touchauth::AuthModel model;
  model.model_id = user_id + "-rf-V-s0";
  model.user_id = user_id;
  model.dataset_id = dataset_id;
  model.architecture = touchauth::Architecture::V;
  model.seed = 0;
  model.normalizer.min.assign(dim, 0.0);
  model.normalizer.max.assign(dim, 1.0);
  for (std::size_t d = 0; d < dim; ++d) {
    model.selector.selected_indices.push_back(static_cast<int>(d));
    model.selector.mi_scores.push_back(0.0);
  }
  const int on_left = accept_left ? 1 : 0;
  const json tree = json::array({
      json{{"f", feature}, {"t", split}, {"l", 1}, {"r", 2}, {"c", -1}},
      json{{"f", -1}, {"t", 0.0}, {"l", -1}, {"r", -1}, {"c", on_left}},
      json{{"f", -1}, {"t", 0.0}, {"l", -1}, {"r", -1}, {"c", 1 - on_left}},
  });
  const json payload{{"kind", "rf"},    {"trees", 1},        {"max_depth", 1},
                     {"min_leaf", 1},   {"mtry", 0},         {"bootstrap", false},
                     {"seed", 0},       {"forest", json::array({tree})}};
  model.classifier = touchauth::classifier_from_json(payload);
  model.threshold = 0.5;
  return model;
}

// Two well-separated Gaussian-ish blobs in [0,1]^dim: label 1 near 0.25,
// label 0 near 0.75 on every coordinate.
inline void make_blobs(std::size_t per_class, std::size_t dim, std::uint64_t seed,
                       std::vector<std::vector<double>>& X, std::vector<int>& y) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> noise(0.0, 0.08);
  X.clear();
  y.clear();
  for (std::size_t c = 0; c < 2; ++c) {
    const double center = c == 1 ? 0.25 : 0.75;
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> row(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        double v = center + noise(eng);
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        row[d] = v;
      }
      X.push_back(std::move(row));
      y.push_back(c == 1 ? 1 : 0);
    }
  }
}

// Window vectors forming two separated clusters with a class imbalance.
inline std::vector<touchauth::WindowVector> imbalanced_windows(std::size_t n_minority,
                                                               std::size_t n_majority,
                                                               std::size_t dim,
                                                               std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<touchauth::WindowVector> out;
  for (std::size_t i = 0; i < n_minority; ++i) {
    touchauth::WindowVector w;
    w.user_id = "m";
    w.window_index = static_cast<int>(i);
    w.label = touchauth::WindowLabel::genuine;
    for (std::size_t d = 0; d < dim; ++d) w.values.push_back(0.3 + u(eng));
    out.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < n_majority; ++i) {
    touchauth::WindowVector w;
    w.user_id = "M";
    w.window_index = static_cast<int>(i);
    w.label = touchauth::WindowLabel::impostor;
    for (std::size_t d = 0; d < dim; ++d) w.values.push_back(0.7 + u(eng));
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace fixtures
