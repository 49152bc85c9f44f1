#pragma once

#include <cstdint>
#include <vector>

#include "touchauth/feature_engine.hpp"

namespace touchauth {

struct AdasynConfig {
  int neighbors = 5;   // K
  double beta = 1.0;   // target balance ratio in (0,1]
  std::uint64_t seed = 0;
};

struct AdasynResult {
  std::vector<WindowVector> windows;  // originals (untouched) followed by synthetics
  std::size_t synthetic_count = 0;
  // Set when every minority sample had only minority K-neighbors (all r_i = 0);
  // the input is then returned unchanged.
  bool all_neighbors_minority = false;
};

// Adaptive synthetic oversampling of the minority class. Labels are the
// binary classes via WindowLabel (genuine/synthetic_genuine vs
// impostor/synthetic_impostor); the class with fewer samples is treated as
// minority. Per minority sample x_i the K nearest samples (Euclidean) give
// r_i = majority-neighbor fraction; after normalizing the r_i, sample x_i
// receives g_i = round_half_up(r_hat_i * G) synthetics with
// G = beta * (majority - minority), each drawn on the segment between x_i and
// a random one of its K nearest minority samples. Synthetic windows carry the
// matching synthetic_* label. Per-sample RNG streams derive from
// (seed, sample index), so results do not depend on evaluation order.
//
// Pre: both classes present, minority count >= K+1 (MinorityTooSmallError).
AdasynResult adasyn_balance(const std::vector<WindowVector>& windows, const AdasynConfig& cfg);

}  // namespace touchauth
