#include "touchauth/feature_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "touchauth/text_util.hpp"

namespace touchauth {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "swipe_duration", "start_x", "start_y", "end_x", "end_y", "dp", "l", "velocity", "initial_v",
      "final_v", "mean_v", "direction", "area", "acceleration", "mean_a", "initial_a", "final_a",
      "aP25", "aP50", "aP75", "vP25", "vP50", "vP75", "speed", "initial_s", "final_s", "sP25",
      "sP50", "sP75", "mean_vx", "mean_vy", "mean_ax", "mean_ay", "mean_d", "max_d", "vxP25",
      "vxP50", "vxP75", "vyP25", "vyP50", "vyP75", "axP25", "axP50", "axP75", "ayP25", "ayP50",
      "ayP75"};
  return names;
}

std::string to_string(WindowLabel label) {
  switch (label) {
    case WindowLabel::genuine: return "genuine";
    case WindowLabel::impostor: return "impostor";
    case WindowLabel::synthetic_genuine: return "synthetic_genuine";
    case WindowLabel::synthetic_impostor: return "synthetic_impostor";
  }
  return "genuine";
}

WindowLabel window_label_from_string(const std::string& s) {
  if (s == "genuine") return WindowLabel::genuine;
  if (s == "impostor") return WindowLabel::impostor;
  if (s == "synthetic_genuine") return WindowLabel::synthetic_genuine;
  if (s == "synthetic_impostor") return WindowLabel::synthetic_impostor;
  throw DataError("unknown window label '" + s + "'");
}

double percentile(const std::vector<double>& series, double m) {
  if (series.empty()) throw EmptySeriesError("percentile of empty series");
  std::vector<double> sorted = series;
  std::sort(sorted.begin(), sorted.end());
  const double rank = m / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - std::floor(rank);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

namespace {

struct Segment {
  double vx, vy;  // pairwise velocity components (px/ms)
  double t;       // timestamp of the segment's trailing point
};

double range_span(const SwipeGesture& s, std::size_t first, std::size_t last) {
  return s.events[last].t_ms - s.events[first].t_ms;
}

// Chord displacement / time span over [first, last]; 0 when the span is 0.
double range_velocity(const SwipeGesture& s, std::size_t first, std::size_t last) {
  const double span = range_span(s, first, last);
  if (span <= 0.0) return 0.0;
  const double dx = s.events[last].x - s.events[first].x;
  const double dy = s.events[last].y - s.events[first].y;
  return std::hypot(dx, dy) / span;
}

// Path length / time span over [first, last]; 0 when the span is 0.
double range_speed(const SwipeGesture& s, std::size_t first, std::size_t last) {
  const double span = range_span(s, first, last);
  if (span <= 0.0) return 0.0;
  double len = 0.0;
  for (std::size_t i = first + 1; i <= last; ++i) {
    len += std::hypot(s.events[i].x - s.events[i - 1].x, s.events[i].y - s.events[i - 1].y);
  }
  return len / span;
}

// (last segment velocity magnitude - first segment velocity magnitude) / span.
double range_acceleration(const SwipeGesture& s, const std::vector<Segment>& segs, std::size_t first,
                          std::size_t last) {
  const double span = range_span(s, first, last);
  if (span <= 0.0) return 0.0;
  const Segment& in = segs[first];       // segment (first, first+1)
  const Segment& out = segs[last - 1];   // segment (last-1, last)
  const double v_in = std::hypot(in.vx, in.vy);
  const double v_out = std::hypot(out.vx, out.vy);
  return (v_out - v_in) / span;
}

}  // namespace

FeatureVector extract_features(const SwipeGesture& swipe) {
  const std::size_t n = swipe.size();
  if (n < 6) throw DataError("extract_features requires a post-filter swipe (n >= 6)");

  const auto& ev = swipe.events;
  const double duration = ev[n - 1].t_ms - ev[0].t_ms;
  if (duration <= 0.0) throw DegenerateSwipeError("swipe has zero total duration");

  // Pairwise segment velocities; zero-dt segments contribute zero velocity.
  std::vector<Segment> segs(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = ev[i].t_ms - ev[i - 1].t_ms;
    Segment& s = segs[i - 1];
    s.t = ev[i].t_ms;
    if (dt > 0.0) {
      s.vx = (ev[i].x - ev[i - 1].x) / dt;
      s.vy = (ev[i].y - ev[i - 1].y) / dt;
    } else {
      s.vx = 0.0;
      s.vy = 0.0;
    }
  }

  // Pairwise accelerations between consecutive segments, dt from the
  // segments' trailing timestamps; zero-dt pairs contribute zero.
  std::vector<double> ax(n - 2), ay(n - 2), a_mag(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dt = segs[i].t - segs[i - 1].t;
    if (dt > 0.0) {
      ax[i - 1] = (segs[i].vx - segs[i - 1].vx) / dt;
      ay[i - 1] = (segs[i].vy - segs[i - 1].vy) / dt;
    } else {
      ax[i - 1] = 0.0;
      ay[i - 1] = 0.0;
    }
    a_mag[i - 1] = std::hypot(ax[i - 1], ay[i - 1]);
  }

  std::vector<double> vx(n - 1), vy(n - 1), v_mag(n - 1);
  for (std::size_t i = 0; i < n - 1; ++i) {
    vx[i] = segs[i].vx;
    vy[i] = segs[i].vy;
    v_mag[i] = std::hypot(vx[i], vy[i]);
  }

  const double dx_chord = ev[n - 1].x - ev[0].x;
  const double dy_chord = ev[n - 1].y - ev[0].y;
  const double dp = std::hypot(dx_chord, dy_chord);

  double path_len = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    path_len += std::hypot(ev[i].x - ev[i - 1].x, ev[i].y - ev[i - 1].y);
  }

  // Deviation of every point from the chord line through the endpoints; a
  // vertical chord degenerates to horizontal distance.
  std::vector<double> dev(n);
  if (dx_chord != 0.0) {
    const double slope = dy_chord / dx_chord;
    const double intercept = ev[0].y - slope * ev[0].x;
    const double denom = std::sqrt(1.0 + slope * slope);
    for (std::size_t i = 0; i < n; ++i) {
      dev[i] = std::abs(ev[i].y - slope * ev[i].x - intercept) / denom;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(ev[i].x - ev[0].x);
  }

  const auto edge = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
  const std::size_t pre_last = edge - 1;      // prefix covers [0, pre_last]
  const std::size_t suf_first = n - edge;     // suffix covers [suf_first, n-1]

  const double initial_v = range_velocity(swipe, 0, pre_last);
  const double final_v = range_velocity(swipe, suf_first, n - 1);

  const auto mean = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  };

  double area_sum = 0.0;
  for (const auto& e : ev) area_sum += 3.14159265358979323846 * e.major_axis * e.minor_axis;

  FeatureVector fv;
  fv.user_id = swipe.user_id;
  fv.swipe_id = swipe.swipe_id;
  fv.t_start = ev[0].t_ms;

  auto& f = fv.values;
  f[0] = duration;
  f[1] = ev[0].x;
  f[2] = ev[0].y;
  f[3] = ev[n - 1].x;
  f[4] = ev[n - 1].y;
  f[5] = dp;
  f[6] = path_len;
  f[7] = dp / duration;
  f[8] = initial_v;
  f[9] = final_v;
  f[10] = mean(v_mag);
  f[11] = std::atan2(dx_chord, dy_chord);
  f[12] = area_sum / static_cast<double>(n);
  f[13] = (final_v - initial_v) / duration;
  f[14] = mean(a_mag);
  f[15] = range_acceleration(swipe, segs, 0, pre_last);
  f[16] = range_acceleration(swipe, segs, suf_first, n - 1);
  f[17] = percentile(a_mag, 25.0);
  f[18] = percentile(a_mag, 50.0);
  f[19] = percentile(a_mag, 75.0);
  f[20] = percentile(v_mag, 25.0);
  f[21] = percentile(v_mag, 50.0);
  f[22] = percentile(v_mag, 75.0);
  f[23] = path_len / duration;
  f[24] = range_speed(swipe, 0, pre_last);
  f[25] = range_speed(swipe, suf_first, n - 1);
  // Pairwise speed equals pairwise velocity magnitude on straight segments;
  // the speed percentiles are kept as their own feature slots regardless.
  f[26] = percentile(v_mag, 25.0);
  f[27] = percentile(v_mag, 50.0);
  f[28] = percentile(v_mag, 75.0);
  f[29] = mean(vx);
  f[30] = mean(vy);
  f[31] = mean(ax);
  f[32] = mean(ay);
  f[33] = mean(dev);
  f[34] = *std::max_element(dev.begin(), dev.end());
  f[35] = percentile(vx, 25.0);
  f[36] = percentile(vx, 50.0);
  f[37] = percentile(vx, 75.0);
  f[38] = percentile(vy, 25.0);
  f[39] = percentile(vy, 50.0);
  f[40] = percentile(vy, 75.0);
  f[41] = percentile(ax, 25.0);
  f[42] = percentile(ax, 50.0);
  f[43] = percentile(ax, 75.0);
  f[44] = percentile(ay, 25.0);
  f[45] = percentile(ay, 50.0);
  f[46] = percentile(ay, 75.0);
  return fv;
}

std::vector<WindowVector> build_windows(const std::vector<FeatureVector>& vectors, int p, int q) {
  if (p < 1 || q < 1) throw ConfigError("window parameters p and q must be >= 1");
  std::vector<WindowVector> out;
  const auto n = static_cast<int>(vectors.size());
  if (n < p) return out;
  const int count = (n - p) / q + 1;
  out.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) {
    WindowVector win;
    win.user_id = vectors.front().user_id;
    win.window_index = w;
    win.values.reserve(static_cast<std::size_t>(p) * kFeatureCount);
    for (int j = 0; j < p; ++j) {
      const auto& fv = vectors[static_cast<std::size_t>(w * q + j)];
      win.values.insert(win.values.end(), fv.values.begin(), fv.values.end());
    }
    out.push_back(std::move(win));
  }
  return out;
}

std::vector<double> Normalizer::apply(const std::vector<double>& values) const {
  if (values.size() != min.size()) {
    throw DimensionMismatchError("normalizer fitted on " + std::to_string(min.size()) +
                                 " dimensions, got " + std::to_string(values.size()));
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double range = max[i] - min[i];
    out[i] = range > 0.0 ? std::clamp((values[i] - min[i]) / range, 0.0, 1.0) : 0.5;
  }
  return out;
}

Normalizer fit_normalizer(const std::vector<WindowVector>& train) {
  if (train.empty()) throw DataError("fit_normalizer requires a non-empty training set");
  const std::size_t dim = train.front().values.size();
  Normalizer norm;
  norm.min.assign(dim, std::numeric_limits<double>::infinity());
  norm.max.assign(dim, -std::numeric_limits<double>::infinity());
  for (const auto& w : train) {
    if (w.values.size() != dim) throw DimensionMismatchError("inconsistent window dimensions");
    for (std::size_t i = 0; i < dim; ++i) {
      norm.min[i] = std::min(norm.min[i], w.values[i]);
      norm.max[i] = std::max(norm.max[i], w.values[i]);
    }
  }
  return norm;
}

WindowVector apply_normalizer(const Normalizer& norm, const WindowVector& v) {
  WindowVector out = v;
  out.values = norm.apply(v.values);
  return out;
}

double mutual_information(const std::vector<double>& feature_column, const std::vector<int>& labels,
                          int bins) {
  const std::size_t k = feature_column.size();
  if (k != labels.size()) throw DimensionMismatchError("feature/label length mismatch");
  if (k < 10) throw DataError("mutual_information requires at least 10 samples");
  if (bins < 2) throw ConfigError("bins must be >= 2");
  bool has0 = false, has1 = false;
  for (int y : labels) (y ? has1 : has0) = true;
  if (!has0 || !has1) throw SingleClassError("mutual_information requires both labels present");

  // Equal-frequency bin of each sample from the rank midpoint of its tied
  // run, so equal values always share a bin.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return feature_column[a] < feature_column[b];
  });

  std::vector<int> bin_of(k);
  std::size_t run_start = 0;
  while (run_start < k) {
    std::size_t run_end = run_start;
    while (run_end + 1 < k &&
           feature_column[order[run_end + 1]] == feature_column[order[run_start]]) {
      ++run_end;
    }
    const double rho = (static_cast<double>(run_start + run_end) + 1.0) / (2.0 * static_cast<double>(k));
    const int b = std::min(bins - 1, static_cast<int>(rho * bins));
    for (std::size_t i = run_start; i <= run_end; ++i) bin_of[order[i]] = b;
    run_start = run_end + 1;
  }

  std::vector<std::array<double, 2>> joint(static_cast<std::size_t>(bins), {0.0, 0.0});
  std::array<double, 2> label_marginal{0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) {
    joint[static_cast<std::size_t>(bin_of[i])][labels[i] ? 1 : 0] += 1.0;
    label_marginal[labels[i] ? 1 : 0] += 1.0;
  }

  const double total = static_cast<double>(k);
  double mi = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double p_b = (joint[b][0] + joint[b][1]) / total;
    if (p_b == 0.0) continue;
    for (int y = 0; y < 2; ++y) {
      const double p_by = joint[b][y] / total;
      if (p_by == 0.0) continue;
      const double p_y = label_marginal[y] / total;
      mi += p_by * std::log(p_by / (p_b * p_y));
    }
  }
  return std::max(0.0, mi);
}

std::vector<double> FeatureSelector::apply(const std::vector<double>& values) const {
  std::vector<double> out;
  out.reserve(selected_indices.size());
  for (int idx : selected_indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= values.size()) {
      throw DimensionMismatchError("selector index out of range");
    }
    out.push_back(values[static_cast<std::size_t>(idx)]);
  }
  return out;
}

WindowVector FeatureSelector::apply(const WindowVector& v) const {
  WindowVector out = v;
  out.values = apply(v.values);
  return out;
}

FeatureSelector select_features(const std::vector<WindowVector>& windows, const std::vector<int>& labels,
                                const std::vector<int>& k_grid,
                                const std::function<double(const std::vector<int>&)>& validation_hter) {
  if (windows.empty()) throw DataError("select_features requires training windows");
  if (k_grid.empty()) throw ConfigError("k_grid must not be empty");
  const auto dim = static_cast<int>(windows.front().values.size());
  for (int k : k_grid) {
    if (k < 1 || k > dim) {
      throw ConfigError("k_grid entry " + std::to_string(k) + " outside [1, " + std::to_string(dim) + "]");
    }
  }

  FeatureSelector sel;
  sel.mi_scores.resize(static_cast<std::size_t>(dim));
  std::vector<double> column(windows.size());
  for (int d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < windows.size(); ++i) column[i] = windows[i].values[static_cast<std::size_t>(d)];
    sel.mi_scores[static_cast<std::size_t>(d)] = mutual_information(column, labels);
  }

  std::vector<int> ranked(static_cast<std::size_t>(dim));
  std::iota(ranked.begin(), ranked.end(), 0);
  std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
    const double sa = sel.mi_scores[static_cast<std::size_t>(a)];
    const double sb = sel.mi_scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  });

  std::vector<int> grid = k_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  int best_k = grid.front();
  if (grid.size() > 1) {
    double best_hter = std::numeric_limits<double>::infinity();
    for (int k : grid) {
      const std::vector<int> candidate(ranked.begin(), ranked.begin() + k);
      const double hter = validation_hter(candidate);
      if (hter < best_hter) {
        best_hter = hter;
        best_k = k;
      }
    }
  }

  sel.selected_indices.assign(ranked.begin(), ranked.begin() + best_k);
  return sel;
}

void write_feature_matrix_csv(const std::vector<WindowVector>& windows,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  const std::size_t dim = windows.empty() ? 0 : windows.front().values.size();
  out << "user_id,window_index,label";
  for (std::size_t i = 0; i < dim; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "f%03zu", i);
    out << ',' << buf;
  }
  out << '\n';
  for (const auto& w : windows) {
    out << w.user_id << ',' << w.window_index << ',' << to_string(w.label);
    for (double v : w.values) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace touchauth
