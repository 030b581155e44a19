#include <doctest.h>

#include <cmath>
#include <set>

#include "osrf/rng.hpp"

using namespace osrf;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same seed reproduces the stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("derive_seed is stable and spreads purposes apart") {
  const std::uint64_t s1 = derive_seed(1, "alpha");
  CHECK(s1 == derive_seed(1, "alpha"));
  CHECK(s1 != derive_seed(1, "beta"));
  CHECK(s1 != derive_seed(2, "alpha"));

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(derive_seed(7, "p:" + std::to_string(i)));
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform stays in [0,1) with a sane mean") {
  Rng rng(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int is unbiased over a small range") {
  Rng rng(5);
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) counts[rng.uniform_int(n)] += 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    CHECK(std::abs(counts[k] - draws / static_cast<int>(n)) < 500);
  }
}

TEST_CASE("normal has zero mean and unit variance") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("complex_normal has unit expected power") {
  Rng rng(13);
  double power = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) power += std::norm(rng.complex_normal());
  CHECK(std::abs(power / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  std::vector<int> w = v;
  Rng a(17), b(17);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::set<int> elems(v.begin(), v.end());
  CHECK(elems.size() == 100);
}

TEST_SUITE_END();
