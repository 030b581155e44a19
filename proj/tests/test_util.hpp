#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "osrf/fft.hpp"
#include "osrf/iq.hpp"

// Test-side spectral oracles, independent of the library's signal path.
namespace osrf_test {

using osrf::cd;

// Hann-windowed power spectrum, FFT-shifted so DC sits at n/2.
inline std::vector<double> hann_power_spectrum(const std::vector<cd>& x) {
  const std::size_t n = x.size();
  std::vector<cd> xw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
    xw[i] = x[i] * w;
  }
  const std::vector<cd> X = osrf::fft_shift(osrf::fft(xw));
  std::vector<double> ps(n);
  for (std::size_t i = 0; i < n; ++i) ps[i] = std::norm(X[i]);
  return ps;
}

// Fraction of total power inside the centered band of the given width.
inline double band_power_fraction(const std::vector<double>& ps, double fs, double bw) {
  const std::size_t n = ps.size();
  const double bin_hz = fs / static_cast<double>(n);
  const auto center = static_cast<double>(n / 2);
  double total = 0.0, inside = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ps[i];
    const double f = (static_cast<double>(i) - center) * bin_hz;
    if (std::abs(f) <= bw / 2.0) inside += ps[i];
  }
  return total > 0.0 ? inside / total : 0.0;
}

// Smallest centered bandwidth containing the given power fraction.
inline double percent_bandwidth(const std::vector<double>& ps, double fs, double frac) {
  const std::size_t n = ps.size();
  const double bin_hz = fs / static_cast<double>(n);
  const std::size_t center = n / 2;
  double total = 0.0;
  for (double p : ps) total += p;
  double acc = ps[center];
  std::size_t half = 0;
  while (acc < frac * total && half < n / 2) {
    ++half;
    if (center + half < n) acc += ps[center + half];
    if (center >= half) acc += ps[center - half];
  }
  return (2.0 * static_cast<double>(half) + 1.0) * bin_hz;
}

inline double papr(const std::vector<cd>& x) {
  double peak = 0.0, mean = 0.0;
  for (const cd& v : x) {
    peak = std::max(peak, std::norm(v));
    mean += std::norm(v);
  }
  mean /= static_cast<double>(x.size());
  return peak / mean;
}

inline double rms_error(const std::vector<cd>& a, const std::vector<cd>& b) {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace osrf_test
