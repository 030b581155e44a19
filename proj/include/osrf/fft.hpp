#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace osrf {

using cd = std::complex<double>;

// Conventions: forward X[k] = sum_n x[n] e^{-j 2pi kn/N} (unscaled);
// inverse x[n] = (1/N) sum_k X[k] e^{+j 2pi kn/N}.
// Parseval with this scaling: sum |x|^2 = (1/N) sum |X|^2.

bool is_pow2(std::size_t n);

// In-place radix-2 DIT transform; a.size() must be a power of two.
void fft_pow2_inplace(std::vector<cd>& a, bool inverse);

// Any length, via radix-2 when possible and Bluestein's chirp-z otherwise.
std::vector<cd> fft(const std::vector<cd>& x, bool inverse = false);

inline std::vector<cd> ifft(const std::vector<cd>& x) { return fft(x, true); }

// Rotate so the DC bin lands at index n/2 (numpy fftshift convention).
template <class T>
std::vector<T> fft_shift(const std::vector<T>& a) {
  const std::size_t n = a.size();
  const std::size_t half = n / 2;
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[(i + half) % n];
  return out;
}

}  // namespace osrf
