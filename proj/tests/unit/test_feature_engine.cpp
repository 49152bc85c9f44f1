#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "../support/feature_oracle.hpp"
#include "../support/fixtures.hpp"
#include "touchauth/errors.hpp"
#include "touchauth/feature_engine.hpp"

using namespace touchauth;

namespace {

SwipeGesture line_swipe() {
  // 6 collinear equally spaced points (0,0) -> (30,40), 50 ms apart, a=b=1
  SwipeGesture s;
  s.user_id = "u";
  s.swipe_id = "line";
  for (int i = 0; i < 6; ++i) {
    s.events.push_back({6.0 * i, 8.0 * i, 50.0 * i, 1.0, 1.0});
  }
  return s;
}

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("extractor matches the independent oracle on random swipes") {
  std::mt19937_64 eng(20240817);
  for (int trial = 0; trial < 100; ++trial) {
    const SwipeGesture swipe = fixtures::random_swipe(eng);
    const FeatureVector got = extract_features(swipe);
    const auto expect = oracle::features(swipe);
    for (int i = 0; i < kFeatureCount; ++i) {
      INFO("trial ", trial, " feature ", i, " n=", swipe.size());
      CHECK(close_rel(got.values[i], expect[i]));
    }
  }
}

TEST_CASE("straight-line swipe geometry") {
  const FeatureVector f = extract_features(line_swipe());
  CHECK(f.values[0] == 250.0);                       // duration
  CHECK(f.values[5] == doctest::Approx(50.0));       // dp
  CHECK(f.values[6] == doctest::Approx(50.0));       // l
  CHECK(f.values[7] == doctest::Approx(0.2));        // velocity
  CHECK(f.values[23] == doctest::Approx(0.2));       // speed
  CHECK(f.values[12] == doctest::Approx(3.14159265358979323846));  // ellipse area
  CHECK(f.values[33] == doctest::Approx(0.0));       // mean deviation
  CHECK(f.values[34] == doctest::Approx(0.0));       // max deviation
  CHECK(f.values.size() == 47);
}

TEST_CASE("degenerate swipes are rejected") {
  SwipeGesture flat = line_swipe();
  for (auto& e : flat.events) e.t_ms = 5.0;
  CHECK_THROWS_AS(extract_features(flat), DegenerateSwipeError);

  SwipeGesture tiny = line_swipe();
  tiny.events.resize(5);
  CHECK_THROWS_AS(extract_features(tiny), Error);
}

TEST_CASE("scaling coordinates scales dp and l exactly") {
  std::mt19937_64 eng(11);
  const SwipeGesture swipe = fixtures::random_swipe(eng);
  SwipeGesture scaled = swipe;
  for (auto& e : scaled.events) {
    e.x *= 3.5;
    e.y *= 3.5;
  }
  const auto a = extract_features(swipe).values;
  const auto b = extract_features(scaled).values;
  CHECK(close_rel(b[5], 3.5 * a[5]));
  CHECK(close_rel(b[6], 3.5 * a[6]));
}

TEST_CASE("time shift leaves all features unchanged") {
  std::mt19937_64 eng(12);
  const SwipeGesture swipe = fixtures::random_swipe(eng);
  SwipeGesture shifted = swipe;
  for (auto& e : shifted.events) e.t_ms += 1234.5;
  const auto a = extract_features(swipe).values;
  const auto b = extract_features(shifted).values;
  for (int i = 0; i < kFeatureCount; ++i) {
    INFO("feature ", i);
    CHECK(close_rel(a[i], b[i], 1e-9));
  }
}

TEST_CASE("reversing a palindromic swipe preserves dp, l and area") {
  SwipeGesture s;
  s.user_id = "u";
  s.swipe_id = "pal";
  const double xs[] = {0, 10, 20, 10, 0, -10};
  const double ys[] = {0, 5, 0, -5, 0, 5};
  for (int i = 0; i < 6; ++i) s.events.push_back({xs[i], ys[i], 40.0 * i, 2.0, 1.0});
  SwipeGesture rev = s;
  std::reverse(rev.events.begin(), rev.events.end());
  for (int i = 0; i < 6; ++i) rev.events[i].t_ms = 40.0 * i;

  const auto a = extract_features(s).values;
  const auto b = extract_features(rev).values;
  CHECK(close_rel(a[5], b[5]));
  CHECK(close_rel(a[6], b[6]));
  CHECK(close_rel(a[12], b[12]));
}

TEST_CASE("percentile hand values") {
  CHECK(percentile({10.0}, 25.0) == 10.0);
  CHECK(percentile({10.0}, 75.0) == 10.0);
  CHECK(percentile({1, 2, 3, 4, 5}, 50.0) == 3.0);
  CHECK(percentile({1, 2, 3, 4}, 25.0) == doctest::Approx(1.75));
  CHECK(percentile({4, 3, 2, 1}, 25.0) == doctest::Approx(1.75));  // order-free
  CHECK(percentile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(percentile({1, 2, 3, 4}, 100.0) == 4.0);
  CHECK_THROWS_AS(percentile({}, 50.0), EmptySeriesError);
}

TEST_CASE("window construction counts and contents") {
  std::vector<FeatureVector> vecs(10);
  for (int i = 0; i < 10; ++i) {
    vecs[i].user_id = "u7";
    vecs[i].values[0] = double(i);
  }

  SUBCASE("10 vectors, p=5, q=1 -> 6 windows of 235") {
    const auto wins = build_windows(vecs, 5, 1);
    REQUIRE(wins.size() == 6);
    for (const auto& w : wins) CHECK(w.values.size() == 235);
    // window w starts at vector w and concatenates 5 consecutive vectors
    for (int w = 0; w < 6; ++w) {
      CHECK(wins[w].window_index == w);
      CHECK(wins[w].user_id == "u7");
      for (int j = 0; j < 5; ++j) {
        CHECK(wins[w].values[static_cast<std::size_t>(47 * j)] == double(w + j));
      }
    }
  }
  SUBCASE("boundary and empty cases") {
    vecs.resize(5);
    CHECK(build_windows(vecs, 5, 1).size() == 1);
    vecs.resize(4);
    CHECK(build_windows(vecs, 5, 1).empty());
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(build_windows(vecs, 0, 1), ConfigError);
    CHECK_THROWS_AS(build_windows(vecs, 5, 0), ConfigError);
  }
}

TEST_CASE("window count equals the closed form for all n <= 30") {
  for (int n = 0; n <= 30; ++n) {
    std::vector<FeatureVector> vecs(static_cast<std::size_t>(n));
    for (int p = 1; p <= std::max(1, n); ++p) {
      for (int q = 1; q <= std::max(1, n); ++q) {
        const auto got = build_windows(vecs, p, q).size();
        const std::size_t expect =
            n < p ? 0 : static_cast<std::size_t>((n - p) / q + 1);
        INFO("n=", n, " p=", p, " q=", q);
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("normalizer maps train range to [0,1] with clamping") {
  std::vector<WindowVector> train(2);
  train[0].values = {2.0, 7.0, 5.0};
  train[1].values = {4.0, 9.0, 5.0};
  const Normalizer norm = fit_normalizer(train);

  CHECK(norm.apply({3.0, 8.0, 5.0}) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(norm.apply({5.0, 6.0, 1.0}) == std::vector<double>{1.0, 0.0, 0.5});  // clamp + constant dim
  CHECK(norm.apply({2.0, 9.0, 9.9}) == std::vector<double>{0.0, 1.0, 0.5});
  CHECK_THROWS_AS(norm.apply({1.0}), DimensionMismatchError);
  CHECK_THROWS_AS(fit_normalizer({}), DataError);

  WindowVector v;
  v.values = {3.0, 8.0, 5.0};
  v.user_id = "u";
  v.window_index = 3;
  v.label = WindowLabel::impostor;
  const WindowVector out = apply_normalizer(norm, v);
  CHECK(out.user_id == "u");
  CHECK(out.window_index == 3);
  CHECK(out.label == WindowLabel::impostor);
}

TEST_CASE("normalizer output always lies in [0,1]") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<WindowVector> train(20);
  for (auto& w : train) {
    for (int d = 0; d < 8; ++d) w.values.push_back(u(eng));
  }
  const Normalizer norm = fit_normalizer(train);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> probe;
    for (int d = 0; d < 8; ++d) probe.push_back(u(eng) * 3.0);
    for (double v : norm.apply(probe)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("mutual information basics") {
  SUBCASE("constant column carries no information") {
    std::vector<double> col(40, 1.0);
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 2);
    CHECK(mutual_information(col, labels) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("column identical to balanced labels gives ln 2") {
    std::vector<double> col;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
      labels.push_back(i < 20 ? 0 : 1);
      col.push_back(labels.back());
    }
    CHECK(mutual_information(col, labels) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  }
  SUBCASE("hand-computed joint table") {
    // 40 samples, 2 bins (values 0/1 with 20 each): joint counts
    //   bin0: 15 of label 0, 5 of label 1 ; bin1: 5 of label 0, 15 of label 1
    std::vector<double> col;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
      col.push_back(0.0);
      labels.push_back(i < 15 ? 0 : 1);
    }
    for (int i = 0; i < 20; ++i) {
      col.push_back(1.0);
      labels.push_back(i < 5 ? 0 : 1);
    }
    double expect = 0.0;
    const double cells[2][2] = {{15, 5}, {5, 15}};
    for (int b = 0; b < 2; ++b) {
      for (int y = 0; y < 2; ++y) {
        const double pxy = cells[b][y] / 40.0;
        expect += pxy * std::log(pxy / (0.5 * 0.5));
      }
    }
    CHECK(mutual_information(col, labels, 10) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("preconditions") {
    std::vector<double> col = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(mutual_information(col, {0, 1, 0, 1, 0}), DataError);
    std::vector<double> big(40, 1.0);
    CHECK_THROWS_AS(mutual_information(big, std::vector<int>(40, 1)), SingleClassError);
    CHECK_THROWS_AS(mutual_information(big, std::vector<int>(39, 1)), DimensionMismatchError);
  }
}

TEST_CASE("mutual information is invariant under monotone transforms") {
  std::mt19937_64 eng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> col;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    const int y = i % 2;
    labels.push_back(y);
    col.push_back(u(eng) + 0.4 * y);
  }
  const double base = mutual_information(col, labels);

  std::vector<double> negated, exped;
  for (double v : col) {
    negated.push_back(-v);
    exped.push_back(std::exp(3.0 * v));
  }
  CHECK(mutual_information(negated, labels) == doctest::Approx(base).epsilon(1e-12));
  CHECK(mutual_information(exped, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("tied values share a bin") {
  // half the samples share one value; MI must treat them as one block
  std::vector<double> col;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    col.push_back(5.0);
    labels.push_back(i % 2);
  }
  for (int i = 0; i < 30; ++i) {
    col.push_back(double(i + 10));
    labels.push_back(1);
  }
  const double mi = mutual_information(col, labels);
  // jittering the tied block apart changes the estimate; with ties intact the
  // tied half is a single uninformative block, so MI stays well below H(Y)
  CHECK(mi >= 0.0);
  double p1 = 45.0 / 60.0;
  const double h_y = -(p1 * std::log(p1) + (1 - p1) * std::log(1 - p1));
  CHECK(mi < h_y);
}

TEST_CASE("feature selection ranks by MI and honors the grid") {
  // dimension 1 mirrors the label, dimension 0 is noise
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<WindowVector> windows(60);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) {
    labels[i] = i % 2;
    windows[i].values = {u(eng), double(labels[i]), u(eng) * 0.5};
  }

  SUBCASE("single candidate keeps top-k without consulting the callback") {
    const FeatureSelector sel = select_features(windows, labels, {1}, [](const std::vector<int>&) -> double {
      throw std::logic_error("callback must not run for a single candidate");
    });
    REQUIRE(sel.selected_indices.size() == 1);
    CHECK(sel.selected_indices[0] == 1);
    CHECK(sel.mi_scores.size() == 3);
  }
  SUBCASE("grid candidates picked by lowest validation value, ties to smaller k") {
    int calls = 0;
    const FeatureSelector sel =
        select_features(windows, labels, {3, 1, 2}, [&](const std::vector<int>& dims) {
          ++calls;
          return dims.size() == 2 ? 0.1 : 0.1 + double(dims.size());
        });
    CHECK(calls == 3);
    CHECK(sel.selected_indices.size() == 2);

    const FeatureSelector tie =
        select_features(windows, labels, {3, 1, 2}, [](const std::vector<int>&) { return 0.25; });
    CHECK(tie.selected_indices.size() == 1);  // tie -> smaller k
  }
  SUBCASE("selected scores are non-increasing") {
    const FeatureSelector sel =
        select_features(windows, labels, {3}, [](const std::vector<int>&) { return 0.0; });
    for (std::size_t i = 1; i < sel.selected_indices.size(); ++i) {
      CHECK(sel.mi_scores[sel.selected_indices[i - 1]] >=
            sel.mi_scores[sel.selected_indices[i]]);
    }
  }
  SUBCASE("out-of-range k rejected") {
    CHECK_THROWS_AS(select_features(windows, labels, {4}, [](const std::vector<int>&) { return 0.0; }),
                    ConfigError);
    CHECK_THROWS_AS(select_features(windows, labels, {}, [](const std::vector<int>&) { return 0.0; }),
                    ConfigError);
  }
}

TEST_CASE("planted informative dimensions are found") {
  // 2 informative + 13 noise dims, k_grid=[2]; require >= 4/5 seeds
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<WindowVector> windows(120);
    std::vector<int> labels(120);
    for (int i = 0; i < 120; ++i) {
      labels[i] = i % 2;
      auto& v = windows[i].values;
      v.resize(15);
      for (int d = 0; d < 15; ++d) v[d] = u(eng);
      v[4] += 1.2 * labels[i];
      v[9] -= 1.2 * labels[i];
    }
    const FeatureSelector sel =
        select_features(windows, labels, {2}, [](const std::vector<int>&) { return 0.0; });
    const std::set<int> got(sel.selected_indices.begin(), sel.selected_indices.end());
    if (got == std::set<int>{4, 9}) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("selector application projects in rank order") {
  FeatureSelector sel;
  sel.selected_indices = {2, 0};
  CHECK(sel.apply(std::vector<double>{10.0, 20.0, 30.0}) == std::vector<double>{30.0, 10.0});
  CHECK_THROWS_AS(sel.apply(std::vector<double>{1.0}), DimensionMismatchError);
}
