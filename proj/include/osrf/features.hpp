#pragma once

#include <cstdint>
#include <vector>

#include "osrf/iq.hpp"

namespace osrf {

struct SliceConfig {
  std::size_t slice_len = 8192;
  std::size_t n_slices_per_signal = 10;
  std::size_t fft_len = 4096;
  std::size_t n_segments = 2;

  void validate() const;  // throws InvalidConfig
};

// Fixed-length sub-signals at uniformly random start offsets, drawn with
// replacement. Labels and meta are inherited; the offset is recorded.
std::vector<IqSignal> bootstrap_slices(const IqSignal& sig, const SliceConfig& cfg, std::uint64_t seed);

// Splits the slice into n_segments consecutive non-overlapping segments
// (rectangular window), DFTs each, and FFT-shifts so DC is centered.
// Rows are segments.
std::vector<std::vector<cd>> stft(const IqSignal& slice, const SliceConfig& cfg);

std::vector<std::vector<double>> magnitude(const std::vector<std::vector<cd>>& m);

// Global min-max scaling to [0, 1] over the whole matrix; a constant matrix
// maps to all zeros.
void normalize_01(std::vector<std::vector<double>>& m);

struct FeatureTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  Meta meta;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// The three-step front end: stft, magnitude, min-max normalization.
FeatureTensor preprocess(const IqSignal& slice, const SliceConfig& cfg);

}  // namespace osrf
