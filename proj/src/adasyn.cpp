#include "touchauth/adasyn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "touchauth/errors.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {

namespace {

bool is_genuine_class(WindowLabel label) {
  return label == WindowLabel::genuine || label == WindowLabel::synthetic_genuine;
}

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

// Indices of the k nearest entries of `pool` to `query`, excluding `self`.
// Ties broken by lower index.
std::vector<std::size_t> k_nearest(const std::vector<const WindowVector*>& pool,
                                   const std::vector<double>& query, std::size_t self,
                                   std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (j == self) continue;
    dist.emplace_back(sq_distance(pool[j]->values, query), j);
  }
  const std::size_t take = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t j = 0; j < take; ++j) out.push_back(dist[j].second);
  return out;
}

}  // namespace

AdasynResult adasyn_balance(const std::vector<WindowVector>& windows, const AdasynConfig& cfg) {
  if (cfg.neighbors < 1) throw ConfigError("adasyn: neighbors must be >= 1");
  if (!(cfg.beta > 0.0) || cfg.beta > 1.0) throw ConfigError("adasyn: beta must be in (0,1]");
  if (windows.empty()) throw SingleClassError("adasyn: empty input");
  const std::size_t dim = windows.front().values.size();
  for (const auto& w : windows) {
    if (w.values.size() != dim) throw DimensionMismatchError("adasyn: ragged window vectors");
  }

  std::vector<std::size_t> genuine_idx;
  std::vector<std::size_t> impostor_idx;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    (is_genuine_class(windows[i].label) ? genuine_idx : impostor_idx).push_back(i);
  }
  if (genuine_idx.empty() || impostor_idx.empty()) {
    throw SingleClassError("adasyn: both classes required");
  }

  const bool genuine_is_minority = genuine_idx.size() <= impostor_idx.size();
  const auto& minority_idx = genuine_is_minority ? genuine_idx : impostor_idx;
  const std::size_t m_small = minority_idx.size();
  const std::size_t m_large = windows.size() - m_small;
  const auto k = static_cast<std::size_t>(cfg.neighbors);
  if (m_small < k + 1) throw MinorityTooSmallError("adasyn: minority class smaller than K+1");

  AdasynResult result;
  result.windows = windows;
  if (m_large == m_small) return result;

  std::vector<const WindowVector*> all;
  all.reserve(windows.size());
  for (const auto& w : windows) all.push_back(&w);
  std::vector<const WindowVector*> minority;
  minority.reserve(m_small);
  for (std::size_t i : minority_idx) minority.push_back(&windows[i]);

  const double total_new = cfg.beta * static_cast<double>(m_large - m_small);

  // r_i: fraction of majority samples among the K nearest in the full set.
  std::vector<double> ratio(m_small, 0.0);
  for (std::size_t mi = 0; mi < m_small; ++mi) {
    const auto neigh = k_nearest(all, minority[mi]->values, minority_idx[mi], k);
    std::size_t majority_count = 0;
    for (std::size_t j : neigh) {
      if (is_genuine_class(all[j]->label) != genuine_is_minority) ++majority_count;
    }
    ratio[mi] = static_cast<double>(majority_count) / static_cast<double>(k);
  }
  const double ratio_sum = std::accumulate(ratio.begin(), ratio.end(), 0.0);
  if (ratio_sum <= 0.0) {
    result.all_neighbors_minority = true;
    return result;
  }

  const WindowLabel synth_label =
      genuine_is_minority ? WindowLabel::synthetic_genuine : WindowLabel::synthetic_impostor;

  for (std::size_t mi = 0; mi < m_small; ++mi) {
    const double share = ratio[mi] / ratio_sum * total_new;
    const auto g_i = static_cast<std::size_t>(std::floor(share + 0.5));
    if (g_i == 0) continue;
    // Minority-only neighbourhood for interpolation partners.
    std::size_t self_in_minority = mi;
    std::vector<const WindowVector*> min_pool(minority.begin(), minority.end());
    const auto partners = k_nearest(min_pool, minority[mi]->values, self_in_minority, k);
    Rng rng(mix_seed(cfg.seed, hash_tag("adasyn"), static_cast<std::uint64_t>(mi)));
    for (std::size_t s = 0; s < g_i; ++s) {
      const std::size_t pick = partners[rng.uniform_index(partners.size())];
      const double lambda = rng.uniform();
      WindowVector synth;
      synth.values.resize(dim);
      const auto& base = minority[mi]->values;
      const auto& other = minority[pick]->values;
      for (std::size_t d = 0; d < dim; ++d) {
        synth.values[d] = base[d] + lambda * (other[d] - base[d]);
      }
      synth.user_id = minority[mi]->user_id;
      synth.window_index = -1;
      synth.label = synth_label;
      result.windows.push_back(std::move(synth));
      ++result.synthetic_count;
    }
  }
  return result;
}

}  // namespace touchauth
