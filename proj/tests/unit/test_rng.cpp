#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "touchauth/rng.hpp"

using namespace touchauth;

TEST_CASE("mix_seed is deterministic and argument-order sensitive") {
  CHECK(mix_seed(42) == mix_seed(42));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
  CHECK(mix_seed(0) != 0);

  // splitmix64 reference values
  CHECK(mix_seed(0) == 0xe220a8397b1dcdafULL);
  CHECK(mix_seed(1) == 0x910a2dec89025cc1ULL);
}

TEST_CASE("hash_tag matches FNV-1a reference values") {
  CHECK(hash_tag("") == 0xcbf29ce484222325ULL);
  CHECK(hash_tag("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hash_tag("adasyn") != hash_tag("tree"));
}

TEST_CASE("uniform consumes one engine draw and matches the bit transform") {
  Rng rng(123);
  std::mt19937_64 ref(123);
  for (int i = 0; i < 1000; ++i) {
    const double expect = static_cast<double>(ref() >> 11) * 0x1.0p-53;
    CHECK(rng.uniform() == expect);
  }
}

TEST_CASE("uniform stays in [0,1) and ranged uniform in [lo,hi)") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  Rng rng2(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng2.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("normal consumes exactly two draws via Box-Muller") {
  Rng rng(99);
  std::mt19937_64 ref(99);
  for (int i = 0; i < 500; ++i) {
    const double u1 = static_cast<double>(ref() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(ref() >> 11) * 0x1.0p-53;
    const double expect =
        std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    CHECK(rng.normal() == expect);
  }
}

TEST_CASE("normal(mean, sd) is an affine transform of the standard draw") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const double z = a.normal();
    CHECK(b.normal(2.0, 3.0) == doctest::Approx(2.0 + 3.0 * z).epsilon(1e-15));
  }
}

TEST_CASE("normal sample moments are sane") {
  Rng rng(2024);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("uniform_index is engine modulo n") {
  Rng rng(17);
  std::mt19937_64 ref(17);
  for (int i = 0; i < 500; ++i) {
    CHECK(rng.uniform_index(37) == static_cast<std::size_t>(ref() % 37));
  }
}

TEST_CASE("shuffle is a Fisher-Yates permutation, reproducible by seed") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> w = v;

  Rng rng(31);
  rng.shuffle(v);

  // replicate: swap from the back using modulo indices
  std::mt19937_64 ref(31);
  for (std::size_t i = w.size(); i > 1; --i) {
    std::swap(w[i - 1], w[static_cast<std::size_t>(ref() % i)]);
  }
  CHECK(v == w);

  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("identical seeds give identical streams; different seeds diverge") {
  Rng a(1000), b(1000), c(1001);
  bool diverged = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    CHECK(va == b.uniform());
    if (va != c.uniform()) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("tag-derived substreams are distinct") {
  std::set<std::uint64_t> seeds;
  for (auto tag : {"adasyn", "tree", "cv-fold", "population", "random"}) {
    seeds.insert(mix_seed(42, hash_tag(tag)));
  }
  CHECK(seeds.size() == 5);
}
