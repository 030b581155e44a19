#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace osrf {

// Stable sub-seed derivation: FNV-1a over the parent seed (little-endian
// bytes) and a purpose string, finished with a splitmix64 mix. Used to fan a
// single run seed out to independent generators without correlation.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

// Seeded random source. The raw stream is std::mt19937_64, whose output is
// pinned bit-for-bit by the C++ standard. All distributions below are built
// from the raw 64-bit output with plain arithmetic, so sequences reproduce
// across standard libraries (std::*_distribution would not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform integer on [0, n); rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller (consumes two uniforms, returns one).
  double normal();

  // Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

  bool coin() { return (gen_() >> 63) != 0; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(v.size()))];
  }

  // Fisher-Yates; portable because uniform_int is.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace osrf
