#include <doctest.h>

#include <cmath>

#include "osrf/fft.hpp"
#include "osrf/rng.hpp"

using namespace osrf;

namespace {

// O(N^2) reference transform; the oracle every fast path is held to.
std::vector<cd> dft_naive(const std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cd> out(n, cd(0, 0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) / static_cast<double>(n);
      out[k] += x[t] * cd(std::cos(ang), std::sin(ang));
    }
  }
  if (inverse) {
    for (auto& v : out) v /= static_cast<double>(n);
  }
  return out;
}

std::vector<cd> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cd> x(n);
  for (auto& v : x) v = rng.complex_normal();
  return x;
}

double max_rel_error(const std::vector<cd>& a, const std::vector<cd>& b) {
  double scale = 0.0;
  for (const cd& v : b) scale = std::max(scale, std::abs(v));
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
  return scale > 0.0 ? err / scale : err;
}

}  // namespace

TEST_SUITE_BEGIN("fft");

TEST_CASE("matches the naive DFT on power-of-two and general lengths") {
  for (std::size_t n : {2u, 4u, 8u, 64u, 256u, 1024u, 3u, 5u, 12u, 49u, 100u, 771u}) {
    const std::vector<cd> x = random_signal(n, 1000 + n);
    CHECK(max_rel_error(fft(x), dft_naive(x, false)) < 1e-9);
    CHECK(max_rel_error(ifft(x), dft_naive(x, true)) < 1e-9);
  }
}

TEST_CASE("forward-inverse round trip is the identity") {
  for (std::size_t n : {16u, 49u, 1024u}) {
    const std::vector<cd> x = random_signal(n, 7 + n);
    const std::vector<cd> back = ifft(fft(x));
    CHECK(max_rel_error(back, x) < 1e-10);
  }
}

TEST_CASE("Parseval holds with the 1/N inverse scaling") {
  for (std::size_t n : {64u, 100u, 1024u}) {
    const std::vector<cd> x = random_signal(n, 31 + n);
    const std::vector<cd> X = fft(x);
    double time_energy = 0.0, freq_energy = 0.0;
    for (const cd& v : x) time_energy += std::norm(v);
    for (const cd& v : X) freq_energy += std::norm(v);
    CHECK(std::abs(freq_energy / static_cast<double>(n) - time_energy) <= 1e-6 * time_energy);
  }
}

TEST_CASE("an integer-bin tone lands in exactly one bin") {
  const std::size_t n = 128;
  const std::size_t k = 9;
  std::vector<cd> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double ang = 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) / static_cast<double>(n);
    x[t] = cd(std::cos(ang), std::sin(ang));
  }
  const std::vector<cd> X = fft(x);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k) {
      CHECK(std::abs(X[i]) == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
    } else {
      CHECK(std::abs(X[i]) < 1e-9 * n);
    }
  }
}

TEST_CASE("fft_shift centers DC") {
  std::vector<int> v = {0, 1, 2, 3, 4, 5};
  const std::vector<int> s = fft_shift(v);
  CHECK(s == std::vector<int>{3, 4, 5, 0, 1, 2});  // DC (index 0) now at n/2
  std::vector<int> odd = {0, 1, 2, 3, 4};
  CHECK(fft_shift(odd) == std::vector<int>{2, 3, 4, 0, 1});
}

TEST_SUITE_END();
