#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "touchauth/data_model.hpp"

namespace touchauth {

inline constexpr int kFeatureCount = 47;

// Ids (1-based) follow the per-swipe feature table; values[i] holds feature
// id i+1:
//   1 duration, 2-5 start/end coordinates, 6 displacement dp, 7 path length l,
//   8 velocity dp/dt, 9-10 initial/final velocity (first/last 5% of points),
//   11 mean pairwise velocity magnitude, 12 direction atan2(dx, dy),
//   13 mean fingertip ellipse area, 14 endpoint acceleration
//   (final_v - initial_v)/dt, 15 mean pairwise acceleration magnitude,
//   16-17 initial/final acceleration, 18-20 acceleration percentiles,
//   21-23 velocity percentiles, 24 speed l/dt, 25-26 initial/final speed,
//   27-29 speed percentiles, 30-33 means of vx, vy, ax, ay, 34 mean chord
//   deviation, 35 max chord deviation, 36-41 vx/vy percentiles, 42-47 ax/ay
//   percentiles (percentiles at 25/50/75).
struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string user_id;
  std::string swipe_id;
  double t_start = 0.0;
};

const std::array<std::string_view, kFeatureCount>& feature_names();

enum class WindowLabel { genuine, impostor, synthetic_genuine, synthetic_impostor };

std::string to_string(WindowLabel label);
WindowLabel window_label_from_string(const std::string& s);

// Concatenation of p consecutive per-swipe feature vectors of one user.
struct WindowVector {
  std::vector<double> values;
  std::string user_id;
  int window_index = 0;
  WindowLabel label = WindowLabel::genuine;
};

// Extracts the 47 per-swipe features. Requires a post-filter swipe (n >= 6)
// and a positive total duration (DegenerateSwipeError otherwise).
//
// Conventions where the feature table leaves room:
//  - "first/last 5% of points" means the first/last max(2, ceil(0.05*n))
//    points.
//  - velocity over a point range = chord displacement / time span; speed over
//    a range = path length / time span; zero span gives 0.
//  - acceleration over a point range = (magnitude of last segment velocity -
//    magnitude of first segment velocity) / time span of the range.
//  - pairwise segments with zero time delta contribute zero velocity and
//    acceleration.
//  - percentiles are linear-interpolation percentiles over the pairwise
//    series (velocities: n-1 entries, accelerations: n-2 entries).
//  - chord deviation d_i uses the line through the swipe endpoints;
//    for a vertical chord d_i = |x_i - x_0|.
FeatureVector extract_features(const SwipeGesture& swipe);

// Linear-interpolation percentile: rank r = m/100 * (k-1) over the sorted
// series, interpolated between the floor/ceil ranks. Throws EmptySeriesError.
double percentile(const std::vector<double>& series, double m);

// Sliding windows over one user's time-ordered feature vectors: window i
// covers [i*q, i*q + p). Returns floor((n-p)/q) + 1 windows for n >= p, else
// none. Each window concatenates p feature vectors (47*p values).
std::vector<WindowVector> build_windows(const std::vector<FeatureVector>& vectors, int p, int q);

// Per-dimension min-max scaling fitted on training windows. apply() maps each
// dimension into [0,1], clamping out-of-range values; a constant training
// dimension maps everything to 0.5.
struct Normalizer {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dimension() const { return min.size(); }
  std::vector<double> apply(const std::vector<double>& values) const;
};

Normalizer fit_normalizer(const std::vector<WindowVector>& train);

WindowVector apply_normalizer(const Normalizer& norm, const WindowVector& v);

// Plug-in mutual information (nats) between a real-valued feature column and
// binary labels, with the column discretized into `bins` equal-frequency
// bins. Tied values always share a bin (bin chosen from the tied run's rank
// midpoint), which makes the estimate invariant under strictly monotone
// transforms of the column. Requires >= 10 samples and both labels present.
double mutual_information(const std::vector<double>& feature_column, const std::vector<int>& labels,
                          int bins = 10);

// Mutual-information ranking of window dimensions plus the chosen top-k set.
// selected_indices are sorted by descending score (ties by ascending index);
// mi_scores holds the score of every dimension.
struct FeatureSelector {
  std::vector<int> selected_indices;
  std::vector<double> mi_scores;

  std::vector<double> apply(const std::vector<double>& values) const;
  WindowVector apply(const WindowVector& v) const;
};

// Ranks dimensions by MI against the labels and picks k from k_grid by lowest
// validation HTER as reported by validation_hter (called with the candidate
// index set); ties prefer the smaller k. With a single candidate the
// validation callback is not invoked.
FeatureSelector select_features(const std::vector<WindowVector>& windows, const std::vector<int>& labels,
                                const std::vector<int>& k_grid,
                                const std::function<double(const std::vector<int>&)>& validation_hter);

// Feature-matrix export, one row per window, pre-normalization:
// user_id,window_index,label,f000..f(47p-1).
void write_feature_matrix_csv(const std::vector<WindowVector>& windows,
                              const std::filesystem::path& path);

}  // namespace touchauth
