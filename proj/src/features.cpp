#include "osrf/features.hpp"

#include <algorithm>
#include <cmath>

#include "osrf/errors.hpp"
#include "osrf/rng.hpp"

namespace osrf {

void SliceConfig::validate() const {
  if (slice_len == 0 || fft_len == 0 || n_segments == 0 || n_slices_per_signal == 0)
    throw InvalidConfig("slice configuration fields must be positive");
  if (slice_len != fft_len * n_segments)
    throw InvalidConfig("slice_len must equal n_segments * fft_len");
}

std::vector<IqSignal> bootstrap_slices(const IqSignal& sig, const SliceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (sig.samples.size() < cfg.slice_len)
    throw SignalTooShort("signal shorter than the slice length");
  Rng rng(seed);
  const std::size_t span = sig.samples.size() - cfg.slice_len + 1;
  std::vector<IqSignal> slices;
  slices.reserve(cfg.n_slices_per_signal);
  for (std::size_t k = 0; k < cfg.n_slices_per_signal; ++k) {
    const auto start = static_cast<std::size_t>(rng.uniform_int(span));
    IqSignal s;
    s.samples.assign(sig.samples.begin() + static_cast<long>(start),
                     sig.samples.begin() + static_cast<long>(start + cfg.slice_len));
    s.sample_rate_hz = sig.sample_rate_hz;
    s.label = sig.label;
    s.meta = sig.meta;
    meta_set(s.meta, "slice_offset", static_cast<double>(start));
    meta_set(s.meta, "slice_index", static_cast<double>(k));
    slices.push_back(std::move(s));
  }
  return slices;
}

std::vector<std::vector<cd>> stft(const IqSignal& slice, const SliceConfig& cfg) {
  cfg.validate();
  if (slice.samples.size() != cfg.slice_len)
    throw LengthMismatch("slice length does not match the configuration");
  std::vector<std::vector<cd>> rows;
  rows.reserve(cfg.n_segments);
  for (std::size_t s = 0; s < cfg.n_segments; ++s) {
    std::vector<cd> seg(slice.samples.begin() + static_cast<long>(s * cfg.fft_len),
                        slice.samples.begin() + static_cast<long>((s + 1) * cfg.fft_len));
    rows.push_back(fft_shift(fft(seg)));
  }
  return rows;
}

std::vector<std::vector<double>> magnitude(const std::vector<std::vector<cd>>& m) {
  std::vector<std::vector<double>> out(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    out[r].resize(m[r].size());
    for (std::size_t c = 0; c < m[r].size(); ++c) out[r][c] = std::abs(m[r][c]);
  }
  return out;
}

void normalize_01(std::vector<std::vector<double>>& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : m) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    for (auto& row : m) std::fill(row.begin(), row.end(), 0.0);
    return;
  }
  const double scale = 1.0 / (hi - lo);
  for (auto& row : m) {
    for (double& v : row) v = (v - lo) * scale;
  }
}

FeatureTensor preprocess(const IqSignal& slice, const SliceConfig& cfg) {
  auto mag = magnitude(stft(slice, cfg));
  normalize_01(mag);
  FeatureTensor t;
  t.rows = cfg.n_segments;
  t.cols = cfg.fft_len;
  t.values.reserve(t.rows * t.cols);
  for (const auto& row : mag) t.values.insert(t.values.end(), row.begin(), row.end());
  t.meta = slice.meta;
  return t;
}

}  // namespace osrf
