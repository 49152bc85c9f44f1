#pragma once

// Straightforward re-implementation of the per-swipe feature set, coded
// directly from the documented definitions with plain loops. Used only to
// cross-check the production extractor; intentionally shares no code with it.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "touchauth/data_model.hpp"

namespace oracle {

inline double pct(std::vector<double> s, double m) {
  std::sort(s.begin(), s.end());
  const double r = m / 100.0 * double(s.size() - 1);
  const std::size_t lo = std::size_t(std::floor(r));
  const std::size_t hi = std::size_t(std::ceil(r));
  return s[lo] + (s[hi] - s[lo]) * (r - std::floor(r));
}

inline std::array<double, 47> features(const touchauth::SwipeGesture& sw) {
  const auto& e = sw.events;
  const std::size_t n = e.size();
  const double T = e[n - 1].t_ms - e[0].t_ms;

  std::vector<double> vx, vy, vmag;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = e[i + 1].t_ms - e[i].t_ms;
    double cx = 0.0, cy = 0.0;
    if (dt > 0.0) {
      cx = (e[i + 1].x - e[i].x) / dt;
      cy = (e[i + 1].y - e[i].y) / dt;
    }
    vx.push_back(cx);
    vy.push_back(cy);
    vmag.push_back(std::sqrt(cx * cx + cy * cy));
  }

  std::vector<double> ax, ay, amag;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dt = e[i + 1].t_ms - e[i].t_ms;  // trailing timestamps of the two segments
    double cx = 0.0, cy = 0.0;
    if (dt > 0.0) {
      cx = (vx[i] - vx[i - 1]) / dt;
      cy = (vy[i] - vy[i - 1]) / dt;
    }
    ax.push_back(cx);
    ay.push_back(cy);
    amag.push_back(std::sqrt(cx * cx + cy * cy));
  }

  const double dxc = e[n - 1].x - e[0].x;
  const double dyc = e[n - 1].y - e[0].y;
  const double dp = std::sqrt(dxc * dxc + dyc * dyc);

  double l = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double sx = e[i].x - e[i - 1].x;
    const double sy = e[i].y - e[i - 1].y;
    l += std::sqrt(sx * sx + sy * sy);
  }

  std::vector<double> dev;
  if (dxc != 0.0) {
    const double m = dyc / dxc;
    const double c = e[0].y - m * e[0].x;
    for (std::size_t i = 0; i < n; ++i) {
      dev.push_back(std::abs(e[i].y - m * e[i].x - c) / std::sqrt(1.0 + m * m));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) dev.push_back(std::abs(e[i].x - e[0].x));
  }

  const std::size_t edge = std::max<std::size_t>(2, std::size_t(std::ceil(0.05 * double(n))));

  const auto range_v = [&](std::size_t a, std::size_t b) {
    const double span = e[b].t_ms - e[a].t_ms;
    if (span <= 0.0) return 0.0;
    const double dx = e[b].x - e[a].x;
    const double dy = e[b].y - e[a].y;
    return std::sqrt(dx * dx + dy * dy) / span;
  };
  const auto range_s = [&](std::size_t a, std::size_t b) {
    const double span = e[b].t_ms - e[a].t_ms;
    if (span <= 0.0) return 0.0;
    double len = 0.0;
    for (std::size_t i = a + 1; i <= b; ++i) {
      const double dx = e[i].x - e[i - 1].x;
      const double dy = e[i].y - e[i - 1].y;
      len += std::sqrt(dx * dx + dy * dy);
    }
    return len / span;
  };
  const auto range_a = [&](std::size_t a, std::size_t b) {
    const double span = e[b].t_ms - e[a].t_ms;
    if (span <= 0.0) return 0.0;
    return (vmag[b - 1] - vmag[a]) / span;
  };

  const auto mean = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s / double(xs.size());
  };

  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    area += 3.14159265358979323846 * e[i].major_axis * e[i].minor_axis;
  }
  area /= double(n);

  const double v0 = range_v(0, edge - 1);
  const double v1 = range_v(n - edge, n - 1);

  std::array<double, 47> f{};
  f[0] = T;
  f[1] = e[0].x;
  f[2] = e[0].y;
  f[3] = e[n - 1].x;
  f[4] = e[n - 1].y;
  f[5] = dp;
  f[6] = l;
  f[7] = dp / T;
  f[8] = v0;
  f[9] = v1;
  f[10] = mean(vmag);
  f[11] = std::atan2(dxc, dyc);
  f[12] = area;
  f[13] = (v1 - v0) / T;
  f[14] = mean(amag);
  f[15] = range_a(0, edge - 1);
  f[16] = range_a(n - edge, n - 1);
  f[17] = pct(amag, 25);
  f[18] = pct(amag, 50);
  f[19] = pct(amag, 75);
  f[20] = pct(vmag, 25);
  f[21] = pct(vmag, 50);
  f[22] = pct(vmag, 75);
  f[23] = l / T;
  f[24] = range_s(0, edge - 1);
  f[25] = range_s(n - edge, n - 1);
  f[26] = pct(vmag, 25);
  f[27] = pct(vmag, 50);
  f[28] = pct(vmag, 75);
  f[29] = mean(vx);
  f[30] = mean(vy);
  f[31] = mean(ax);
  f[32] = mean(ay);
  f[33] = mean(dev);
  f[34] = *std::max_element(dev.begin(), dev.end());
  f[35] = pct(vx, 25);
  f[36] = pct(vx, 50);
  f[37] = pct(vx, 75);
  f[38] = pct(vy, 25);
  f[39] = pct(vy, 50);
  f[40] = pct(vy, 75);
  f[41] = pct(ax, 25);
  f[42] = pct(ax, 50);
  f[43] = pct(ax, 75);
  f[44] = pct(ay, 25);
  f[45] = pct(ay, 50);
  f[46] = pct(ay, 75);
  return f;
}

}  // namespace oracle
