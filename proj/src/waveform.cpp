#include "osrf/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osrf/errors.hpp"
#include "osrf/rng.hpp"

namespace osrf {

namespace {

constexpr double kTau = 2.0 * M_PI;

std::size_t sample_count(const WaveformSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw InvalidSpec("duration_s must be positive");
  if (!(spec.sample_rate_hz > 0.0)) throw InvalidSpec("sample_rate_hz must be positive");
  const double n = std::round(spec.duration_s * spec.sample_rate_hz);
  if (n < 1.0) throw InvalidSpec("duration too short for the sample rate");
  return static_cast<std::size_t>(n);
}

void check_common(const WaveformSpec& spec) {
  if (!(spec.occupied_bandwidth_hz > 0.0)) throw InvalidSpec("occupied_bandwidth_hz must be positive");
  if (spec.occupied_bandwidth_hz >= spec.sample_rate_hz)
    throw InvalidSpec("occupied bandwidth must be below the sample rate");
  if (!(spec.occupancy > 0.0) || spec.occupancy > 1.0) throw InvalidSpec("occupancy must be in (0, 1]");
}

// On/off mask from the burst plan; alternates bursts and gaps until the
// signal is covered. Draws come from a dedicated sub-stream.
std::vector<char> burst_mask(const WaveformSpec& spec, std::size_t total) {
  std::vector<char> mask(total, 1);
  if (!spec.bursts.enabled) return mask;
  const BurstPlan& b = spec.bursts;
  if (!(b.on_min_s > 0.0) || b.on_max_s < b.on_min_s || b.gap_min_s < 0.0 || b.gap_max_s < b.gap_min_s)
    throw InvalidSpec("invalid burst plan");
  Rng rng(derive_seed(spec.seed, "bursts"));
  std::fill(mask.begin(), mask.end(), 0);
  const double fs = spec.sample_rate_hz;
  std::size_t cursor = 0;
  while (cursor < total) {
    const auto on = static_cast<std::size_t>(std::max(1.0, std::round(rng.uniform(b.on_min_s, b.on_max_s) * fs)));
    for (std::size_t i = cursor; i < std::min(total, cursor + on); ++i) mask[i] = 1;
    cursor += on;
    cursor += static_cast<std::size_t>(std::round(rng.uniform(b.gap_min_s, b.gap_max_s) * fs));
  }
  return mask;
}

void apply_mask(std::vector<cd>& samples, const std::vector<char>& mask) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!mask[i]) samples[i] = cd(0.0, 0.0);
  }
}

Meta base_meta(const WaveformSpec& spec, const char* generator) {
  Meta m;
  meta_set(m, "generator", std::string(generator));
  meta_set(m, "class", to_string(spec.class_id));
  meta_set(m, "modulation", to_string(spec.modulation));
  meta_set(m, "seed", static_cast<double>(spec.seed));
  meta_set(m, "occupied_bandwidth_hz", spec.occupied_bandwidth_hz);
  meta_set(m, "duration_s", spec.duration_s);
  return m;
}

bool is_psk_qam(Modulation m) {
  switch (m) {
    case Modulation::Bpsk:
    case Modulation::Qpsk:
    case Modulation::Psk16:
    case Modulation::Psk64:
    case Modulation::Qam16:
    case Modulation::Qam64:
    case Modulation::Qam256:
      return true;
    default:
      return false;
  }
}

std::vector<cd> square_qam(int side) {
  std::vector<cd> pts;
  pts.reserve(static_cast<std::size_t>(side) * side);
  double energy = 0.0;
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const double re = 2.0 * i - (side - 1);
      const double im = 2.0 * q - (side - 1);
      pts.emplace_back(re, im);
      energy += re * re + im * im;
    }
  }
  const double scale = 1.0 / std::sqrt(energy / pts.size());
  for (auto& p : pts) p *= scale;
  return pts;
}

std::vector<cd> psk(int order) {
  std::vector<cd> pts(order);
  for (int k = 0; k < order; ++k) {
    const double ang = kTau * k / order + (order == 4 ? M_PI / 4.0 : 0.0);
    pts[k] = cd(std::cos(ang), std::sin(ang));
  }
  return pts;
}

double kaiser_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double x2 = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= x2 / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Transmit low-pass: Kaiser windowed sinc, ~50 dB stopband, transition about
// one subcarrier spacing wide centered on the cutoff.
void tx_lowpass(std::vector<cd>& x, double fs, double cutoff_hz, double transition_hz) {
  const double d_omega = 2.0 * M_PI * transition_hz / fs;
  auto half = static_cast<std::size_t>(std::ceil((50.0 - 8.0) / (2.285 * d_omega) / 2.0));
  half = std::clamp<std::size_t>(half, 16, 768);
  const double beta = 4.533;  // Kaiser parameter for ~50 dB
  const double i0b = kaiser_i0(beta);
  std::vector<double> h(2 * half + 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(half);
    const double u = t / static_cast<double>(half);
    const double w = kaiser_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
    const double s = t == 0.0 ? 2.0 * cutoff_hz / fs : std::sin(kTau * cutoff_hz * t / fs) / (M_PI * t);
    h[i] = w * s;
  }
  std::vector<cd> y(x.size(), cd(0, 0));
  const auto n = static_cast<long>(x.size());
  for (long i = 0; i < n; ++i) {
    cd acc(0, 0);
    const long lo = std::max(0L, i - static_cast<long>(half));
    const long hi = std::min(n - 1, i + static_cast<long>(half));
    for (long j = lo; j <= hi; ++j) acc += x[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(i - j + static_cast<long>(half))];
    y[static_cast<std::size_t>(i)] = acc;
  }
  x = std::move(y);
}

// ---------------------------------------------------------------------------
// Multicarrier core (shared by OFDM and SC-FDMA)
// ---------------------------------------------------------------------------

struct GridGeometry {
  std::size_t nfft = 0;
  std::size_t n_sc = 0;
  std::size_t cp_len = 0;
  std::vector<int> sc_index;  // ascending frequency order, DC skipped
};

GridGeometry grid_geometry(const WaveformSpec& spec) {
  if (!(spec.subcarrier_spacing_hz > 0.0)) throw InvalidSpec("subcarrier spacing required for multicarrier");
  GridGeometry g;
  const double nfft_f = std::round(spec.sample_rate_hz / spec.subcarrier_spacing_hz);
  if (nfft_f < 4.0) throw InvalidSpec("subcarrier spacing too wide for the sample rate");
  g.nfft = static_cast<std::size_t>(nfft_f);
  const double nsc_f = std::round(spec.occupied_bandwidth_hz / spec.subcarrier_spacing_hz);
  if (nsc_f < 1.0) throw InvalidSpec("occupied bandwidth below one subcarrier");
  g.n_sc = static_cast<std::size_t>(nsc_f);
  if (g.n_sc + 2 > g.nfft) throw InvalidSpec("occupied band too wide for the sample rate");
  if (spec.cp_fraction < 0.0 || spec.cp_fraction > 0.5) throw InvalidSpec("cp_fraction out of range");
  g.cp_len = static_cast<std::size_t>(std::round(spec.cp_fraction * static_cast<double>(g.nfft)));
  const int lo = -static_cast<int>(g.n_sc / 2);
  for (int k = lo; k <= static_cast<int>((g.n_sc + 1) / 2); ++k) {
    if (k == 0) continue;
    g.sc_index.push_back(k);
    if (g.sc_index.size() == g.n_sc) break;
  }
  return g;
}

IqSignal gen_multicarrier(const WaveformSpec& spec, bool dft_spread, const char* generator) {
  check_common(spec);
  const GridGeometry g = grid_geometry(spec);
  const std::size_t total = sample_count(spec);
  const std::size_t sym_len = g.nfft + g.cp_len;
  const std::size_t n_sym = (total + sym_len - 1) / sym_len;

  const std::vector<cd> points = constellation_points(spec.modulation);
  Rng data_rng(derive_seed(spec.seed, "data"));
  Rng alloc_rng(derive_seed(spec.seed, "alloc"));
  Rng pilot_rng(spec.pilots.sequence_seed);
  const std::vector<cd> pilot_points = constellation_points(Modulation::Qpsk);
  const bool pilots_on = spec.pilots.sc_step > 0 && spec.pilots.sym_step > 0;

  // Bursty traffic allocates whole slots (7 symbols) at a time so the grid
  // fills in contiguous blocks; Uniform draws each element independently.
  // DFT-spread (uplink-style) transmissions always occupy a contiguous
  // subcarrier block, re-granted per slot.
  constexpr std::size_t kSlotSymbols = 7;
  bool slot_active = true;
  // Time-bursty grants span the whole band; steady traffic gets a block
  // sized by the occupancy.
  const std::size_t grant_width =
      !dft_spread ? 0
      : spec.traffic_model == TrafficModel::Bursty
          ? g.n_sc
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                         spec.occupancy * static_cast<double>(g.n_sc))));
  std::size_t grant_start = 0;

  // Raised-cosine symbol edges, overlap-added with the neighbors. Rectangular
  // symbols leak heavily outside the occupied band when the grid is narrow;
  // the taper is skipped when there is no cyclic prefix so CP-free symbols
  // stay bin-exact.
  const std::size_t taper = g.cp_len > 0 ? std::max(g.cp_len, g.nfft / 8) : 0;
  std::vector<double> ramp(taper);
  for (std::size_t i = 0; i < taper; ++i)
    ramp[i] = 0.5 - 0.5 * std::cos(M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(taper));

  std::vector<cd> samples(n_sym * sym_len + taper, cd(0, 0));
  std::vector<cd> grid(g.nfft);
  std::vector<cd> spread_in;
  for (std::size_t s = 0; s < n_sym; ++s) {
    if (s % kSlotSymbols == 0) {
      if (spec.traffic_model == TrafficModel::Bursty) slot_active = alloc_rng.uniform() < spec.occupancy;
      if (dft_spread) grant_start = static_cast<std::size_t>(alloc_rng.uniform_int(g.n_sc - grant_width + 1));
    }

    std::fill(grid.begin(), grid.end(), cd(0.0, 0.0));
    spread_in.clear();
    std::vector<std::size_t> data_bins;
    for (std::size_t i = 0; i < g.n_sc; ++i) {
      const int k = g.sc_index[i];
      const std::size_t bin = k >= 0 ? static_cast<std::size_t>(k) : g.nfft - static_cast<std::size_t>(-k);
      // Downlink-style grids scatter pilots over (sc_step, sym_step);
      // uplink-style (DFT-spread) transmissions send whole reference symbols
      // across the granted block, the way SC-FDMA demodulation reference
      // signals work.
      const bool pilot_symbol = pilots_on && s % static_cast<std::size_t>(spec.pilots.sym_step) == 0;
      const bool pilot_here =
          dft_spread ? pilot_symbol && i >= grant_start && i < grant_start + grant_width
                     : pilot_symbol && i % static_cast<std::size_t>(spec.pilots.sc_step) == 0;
      const cd pilot_value = pilots_on ? pilot_rng.pick(pilot_points) : cd(0, 0);  // keeps the stream aligned
      bool active;
      if (dft_spread) {
        active = i >= grant_start && i < grant_start + grant_width &&
                 (spec.traffic_model == TrafficModel::Uniform || slot_active);
      } else if (spec.traffic_model == TrafficModel::Uniform) {
        active = spec.occupancy >= 1.0 || alloc_rng.uniform() < spec.occupancy;
      } else {
        active = slot_active;
      }
      if (pilot_here) {
        grid[bin] = pilot_value;
      } else if (active) {
        const cd d = data_rng.pick(points);
        if (dft_spread) {
          spread_in.push_back(d);
          data_bins.push_back(bin);
        } else {
          grid[bin] = d;
        }
      }
    }
    if (dft_spread && !spread_in.empty()) {
      std::vector<cd> spread = fft(spread_in, false);
      const double scale = 1.0 / std::sqrt(static_cast<double>(spread.size()));
      for (std::size_t i = 0; i < spread.size(); ++i) grid[data_bins[i]] = spread[i] * scale;
    }
    std::vector<cd> sym = ifft(grid);
    // Windowed symbol: [cp | body | cyclic suffix], the rise eating into the
    // CP and the suffix fall overlapping the next symbol's rise.
    const std::size_t ext_len = sym_len + taper;
    const std::size_t base = s * sym_len;
    for (std::size_t j = 0; j < ext_len; ++j) {
      const std::size_t pos = base + j;
      if (pos >= samples.size()) break;
      const std::size_t body_idx = (j + g.nfft - g.cp_len) % g.nfft;
      double w = 1.0;
      if (j < taper) {
        w = ramp[j];
      } else if (j >= sym_len) {
        w = ramp[ext_len - 1 - j];
      }
      samples[pos] += w * sym[body_idx];
    }
  }
  samples.resize(total);
  // CP-bearing (standard-like) signals get the transmit mask filter; bare
  // CP-free grids stay untouched so bin-level structure is exact.
  if (taper > 0)
    tx_lowpass(samples, spec.sample_rate_hz, spec.occupied_bandwidth_hz / 2.0, spec.subcarrier_spacing_hz);
  apply_mask(samples, burst_mask(spec, total));

  IqSignal out;
  out.samples = std::move(samples);
  out.sample_rate_hz = spec.sample_rate_hz;
  out.label = spec.class_id;
  out.meta = base_meta(spec, generator);
  meta_set(out.meta, "subcarrier_spacing_hz", spec.subcarrier_spacing_hz);
  meta_set(out.meta, "nfft", static_cast<double>(g.nfft));
  meta_set(out.meta, "n_subcarriers", static_cast<double>(g.n_sc));
  meta_set(out.meta, "cp_len", static_cast<double>(g.cp_len));
  meta_set(out.meta, "dft_spread", dft_spread ? 1.0 : 0.0);
  normalize_power(out);
  return out;
}

// Root-raised-cosine impulse response, normalized to h(0) = 1 so symbol
// instants are interference-free at roll-off 0.
double rrc_tap(double t_norm, double beta) {
  if (beta <= 0.0) {
    if (t_norm == 0.0) return 1.0;
    return std::sin(M_PI * t_norm) / (M_PI * t_norm);
  }
  const double peak = 1.0 - beta + 4.0 * beta / M_PI;
  if (t_norm == 0.0) return 1.0;
  const double brk = 1.0 / (4.0 * beta);
  if (std::abs(std::abs(t_norm) - brk) < 1e-12) {
    const double v = (beta / std::sqrt(2.0)) *
                     ((1.0 + 2.0 / M_PI) * std::sin(M_PI / (4.0 * beta)) +
                      (1.0 - 2.0 / M_PI) * std::cos(M_PI / (4.0 * beta)));
    return v / peak;
  }
  const double num = std::sin(M_PI * t_norm * (1.0 - beta)) +
                     4.0 * beta * t_norm * std::cos(M_PI * t_norm * (1.0 + beta));
  const double den = M_PI * t_norm * (1.0 - (4.0 * beta * t_norm) * (4.0 * beta * t_norm));
  return num / den / peak;
}

// ---------------------------------------------------------------------------
// Analog message construction: band-limited Gaussian noise built directly in
// the frequency domain, so band edges are exact over the record.
// ---------------------------------------------------------------------------

std::vector<cd> message_spectrum_bins(std::size_t total, double fs, double msg_bw, Rng& rng) {
  const double bin_hz = fs / static_cast<double>(total);
  const auto n_bins = static_cast<std::size_t>(std::floor(msg_bw / bin_hz));
  if (n_bins < 1) throw InvalidSpec("message bandwidth below one FFT bin; increase duration or bandwidth");
  if (n_bins >= total / 2) throw InvalidSpec("message bandwidth too wide for the sample rate");
  std::vector<cd> bins(n_bins);
  for (auto& b : bins) b = rng.complex_normal();
  return bins;
}

std::vector<double> real_message(std::size_t total, double fs, double msg_bw, Rng& rng) {
  std::vector<cd> spec(total, cd(0, 0));
  const std::vector<cd> bins = message_spectrum_bins(total, fs, msg_bw, rng);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    spec[k + 1] = bins[k];
    spec[total - 1 - k] = std::conj(bins[k]);
  }
  std::vector<cd> t = ifft(spec);
  std::vector<double> msg(total);
  double peak = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    msg[i] = t[i].real();
    peak = std::max(peak, std::abs(msg[i]));
  }
  if (peak > 0.0) {
    for (auto& v : msg) v /= peak;
  }
  return msg;
}

}  // namespace

std::string to_string(Modulation mod) {
  switch (mod) {
    case Modulation::Bpsk: return "bpsk";
    case Modulation::Qpsk: return "qpsk";
    case Modulation::Psk16: return "16psk";
    case Modulation::Psk64: return "64psk";
    case Modulation::Qam16: return "16qam";
    case Modulation::Qam64: return "64qam";
    case Modulation::Qam256: return "256qam";
    case Modulation::Gfsk: return "gfsk";
    case Modulation::AmDsb: return "am-dsb";
    case Modulation::AmSsb: return "am-ssb";
    case Modulation::Fm: return "fm";
  }
  return "?";
}

Modulation modulation_from_string(const std::string& name) {
  static const std::vector<Modulation> all = {
      Modulation::Bpsk, Modulation::Qpsk, Modulation::Psk16,  Modulation::Psk64, Modulation::Qam16,
      Modulation::Qam64, Modulation::Qam256, Modulation::Gfsk, Modulation::AmDsb, Modulation::AmSsb,
      Modulation::Fm};
  for (Modulation m : all) {
    if (to_string(m) == name) return m;
  }
  throw InvalidSpec("unknown modulation: " + name);
}

std::vector<cd> constellation_points(Modulation mod) {
  switch (mod) {
    case Modulation::Bpsk: return {cd(1, 0), cd(-1, 0)};
    case Modulation::Qpsk: return psk(4);
    case Modulation::Psk16: return psk(16);
    case Modulation::Psk64: return psk(64);
    case Modulation::Qam16: return square_qam(4);
    case Modulation::Qam64: return square_qam(8);
    case Modulation::Qam256: return square_qam(16);
    default:
      throw InvalidSpec("no constellation for modulation " + to_string(mod));
  }
}

IqSignal gen_ofdm(const WaveformSpec& spec) { return gen_multicarrier(spec, false, "ofdm"); }

IqSignal gen_scfdma(const WaveformSpec& spec) { return gen_multicarrier(spec, spec.dft_spread, "scfdma"); }

IqSignal gen_sc(const WaveformSpec& spec) {
  check_common(spec);
  if (!is_psk_qam(spec.modulation)) throw InvalidSpec("single carrier requires a PSK/QAM constellation");
  if (spec.rolloff < 0.0 || spec.rolloff >= 1.0) throw InvalidSpec("rolloff must be in [0, 1)");
  const std::size_t total = sample_count(spec);
  const double target_symbol_rate = spec.occupied_bandwidth_hz / (1.0 + spec.rolloff);
  const auto sps = static_cast<std::size_t>(std::max(2.0, std::round(spec.sample_rate_hz / target_symbol_rate)));
  const double symbol_rate = spec.sample_rate_hz / static_cast<double>(sps);

  constexpr std::size_t kSpanSymbols = 12;
  const std::size_t half = kSpanSymbols * sps / 2;
  std::vector<double> h(2 * half + 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double t_norm = (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(sps);
    h[i] = rrc_tap(t_norm, spec.rolloff);
  }

  const std::vector<cd> points = constellation_points(spec.modulation);
  Rng data_rng(derive_seed(spec.seed, "data"));
  const std::size_t n_sym = total / sps + kSpanSymbols + 1;
  std::vector<cd> shaped((n_sym - 1) * sps + h.size(), cd(0, 0));
  for (std::size_t k = 0; k < n_sym; ++k) {
    const cd d = data_rng.pick(points);
    const std::size_t start = k * sps;
    for (std::size_t i = 0; i < h.size(); ++i) shaped[start + i] += d * h[i];
  }
  // Drop the filter ramp-up so sample 0 sits in steady state.
  std::vector<cd> samples(shaped.begin() + static_cast<long>(half), shaped.begin() + static_cast<long>(half + total));
  apply_mask(samples, burst_mask(spec, total));

  IqSignal out;
  out.samples = std::move(samples);
  out.sample_rate_hz = spec.sample_rate_hz;
  out.label = spec.class_id;
  out.meta = base_meta(spec, "sc");
  meta_set(out.meta, "symbol_rate_hz", symbol_rate);
  meta_set(out.meta, "samples_per_symbol", static_cast<double>(sps));
  meta_set(out.meta, "rolloff", spec.rolloff);
  normalize_power(out);
  return out;
}

std::vector<cd> gfsk_modulate(const std::vector<int>& bits, double sample_rate_hz, double bitrate_hz,
                              double mod_index, double bt) {
  if (bits.empty()) throw InvalidSpec("gfsk_modulate: no bits");
  if (!(bitrate_hz > 0.0) || !(sample_rate_hz > 0.0)) throw InvalidSpec("gfsk_modulate: bad rates");
  if (!(mod_index > 0.0) || !(bt > 0.0)) throw InvalidSpec("gfsk_modulate: bad pulse parameters");
  const auto sps = static_cast<std::size_t>(std::max(2.0, std::round(sample_rate_hz / bitrate_hz)));
  // Gaussian frequency pulse; sigma in samples from the BT product.
  const double sigma = static_cast<double>(sps) * std::sqrt(std::log(2.0)) / (kTau * bt);
  const auto kspan = static_cast<long>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * kspan + 1);
  double ksum = 0.0;
  for (long i = -kspan; i <= kspan; ++i) {
    const double v = std::exp(-0.5 * (static_cast<double>(i) / sigma) * (static_cast<double>(i) / sigma));
    kernel[static_cast<std::size_t>(i + kspan)] = v;
    ksum += v;
  }
  for (auto& v : kernel) v /= ksum;

  const std::size_t total = bits.size() * sps;
  auto nrz_at = [&](long n) {
    long idx = n / static_cast<long>(sps);
    if (n < 0) idx = 0;  // replicate edges so boundary bits see a full pulse
    idx = std::clamp(idx, 0L, static_cast<long>(bits.size()) - 1);
    return bits[static_cast<std::size_t>(idx)] ? 1.0 : -1.0;
  };
  std::vector<cd> out(total);
  double phase = 0.0;
  const double dphi_scale = M_PI * mod_index / static_cast<double>(sps);
  for (std::size_t n = 0; n < total; ++n) {
    double m = 0.0;
    for (long i = -kspan; i <= kspan; ++i) m += kernel[static_cast<std::size_t>(i + kspan)] * nrz_at(static_cast<long>(n) + i);
    out[n] = cd(std::cos(phase), std::sin(phase));
    phase += dphi_scale * m;
    if (phase > kTau) phase -= kTau;
    if (phase < -kTau) phase += kTau;
  }
  return out;
}

IqSignal gen_gfsk(const WaveformSpec& spec) {
  check_common(spec);
  const std::size_t total = sample_count(spec);
  const double bitrate = spec.gfsk_bitrate_hz > 0.0 ? spec.gfsk_bitrate_hz : spec.occupied_bandwidth_hz / 1.25;
  if (bitrate >= spec.sample_rate_hz) throw InvalidSpec("GFSK bitrate must be below the sample rate");
  const auto sps = static_cast<std::size_t>(std::max(2.0, std::round(spec.sample_rate_hz / bitrate)));
  const std::size_t n_bits = total / sps + 2;
  Rng data_rng(derive_seed(spec.seed, "data"));
  std::vector<int> bits(n_bits);
  for (auto& b : bits) b = data_rng.coin() ? 1 : 0;
  std::vector<cd> mod = gfsk_modulate(bits, spec.sample_rate_hz, bitrate, spec.gfsk_h, spec.gfsk_bt);
  mod.resize(total);
  apply_mask(mod, burst_mask(spec, total));

  IqSignal out;
  out.samples = std::move(mod);
  out.sample_rate_hz = spec.sample_rate_hz;
  out.label = spec.class_id;
  out.meta = base_meta(spec, "gfsk");
  meta_set(out.meta, "bitrate_hz", spec.sample_rate_hz / static_cast<double>(sps));
  meta_set(out.meta, "gfsk_h", spec.gfsk_h);
  meta_set(out.meta, "gfsk_bt", spec.gfsk_bt);
  normalize_power(out);
  return out;
}

IqSignal gen_analog(const WaveformSpec& spec) {
  check_common(spec);
  const std::size_t total = sample_count(spec);
  const double msg_bw = spec.message_bw_fraction * spec.occupied_bandwidth_hz;
  Rng msg_rng(derive_seed(spec.seed, "message"));

  std::vector<cd> samples(total);
  const char* generator = "analog";
  switch (spec.modulation) {
    case Modulation::AmDsb: {
      if (spec.am_depth < 0.0 || spec.am_depth > 1.0) throw InvalidSpec("am_depth must be in [0, 1]");
      const std::vector<double> msg =
          spec.am_depth > 0.0 ? real_message(total, spec.sample_rate_hz, msg_bw, msg_rng)
                              : std::vector<double>(total, 0.0);
      for (std::size_t i = 0; i < total; ++i) samples[i] = cd(1.0 + spec.am_depth * msg[i], 0.0);
      generator = "am_dsb";
      break;
    }
    case Modulation::AmSsb: {
      // One-sided spectrum by construction: only positive (or only negative)
      // frequency bins are drawn, so the other sideband is exactly empty.
      std::vector<cd> bins = message_spectrum_bins(total, spec.sample_rate_hz, msg_bw, msg_rng);
      const bool upper = Rng(derive_seed(spec.seed, "sideband")).coin();
      std::vector<cd> spectrum(total, cd(0, 0));
      for (std::size_t k = 0; k < bins.size(); ++k) {
        if (upper)
          spectrum[k + 1] = bins[k];
        else
          spectrum[total - 1 - k] = bins[k];
      }
      samples = ifft(spectrum);
      generator = upper ? "am_ssb_usb" : "am_ssb_lsb";
      break;
    }
    case Modulation::Fm: {
      const std::vector<double> msg = real_message(total, spec.sample_rate_hz, msg_bw, msg_rng);
      const double deviation = spec.occupied_bandwidth_hz / 2.0 - msg_bw;
      if (deviation <= 0.0) throw InvalidSpec("FM deviation non-positive; lower message_bw_fraction");
      double phase = 0.0;
      for (std::size_t i = 0; i < total; ++i) {
        samples[i] = cd(std::cos(phase), std::sin(phase));
        phase += kTau * deviation * msg[i] / spec.sample_rate_hz;
        if (phase > kTau) phase -= kTau;
        if (phase < -kTau) phase += kTau;
      }
      generator = "fm";
      break;
    }
    default:
      throw InvalidSpec("gen_analog requires AM-DSB, AM-SSB, or FM modulation");
  }

  IqSignal out;
  out.samples = std::move(samples);
  out.sample_rate_hz = spec.sample_rate_hz;
  out.label = spec.class_id;
  out.meta = base_meta(spec, generator);
  meta_set(out.meta, "message_bw_hz", msg_bw);
  if (spec.modulation == Modulation::AmDsb) meta_set(out.meta, "am_depth", spec.am_depth);
  normalize_power(out);
  return out;
}

IqSignal generate(const WaveformSpec& spec) {
  switch (spec.modulation) {
    case Modulation::Gfsk:
      return gen_gfsk(spec);
    case Modulation::AmDsb:
    case Modulation::AmSsb:
    case Modulation::Fm:
      return gen_analog(spec);
    default:
      break;
  }
  if (spec.subcarrier_spacing_hz > 0.0) return spec.dft_spread ? gen_scfdma(spec) : gen_ofdm(spec);
  return gen_sc(spec);
}

namespace {

std::uint64_t pilot_seed(const char* cls) { return derive_seed(0x70696c6f74ULL, cls); }

}  // namespace

WaveformSpec draw_class_spec(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz) {
  const double scale = sample_rate_hz / 3.84e6;
  Rng rng(derive_seed(seed, "family"));
  WaveformSpec s;
  s.class_id = cls;
  s.sample_rate_hz = sample_rate_hz;
  s.duration_s = duration_s;
  s.seed = seed;
  s.dft_spread = false;

  const std::vector<Modulation> cellular_dl = {Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64};
  const std::vector<Modulation> generic_mods = {Modulation::Qpsk,  Modulation::Psk16, Modulation::Psk64,
                                                Modulation::Qam16, Modulation::Qam64, Modulation::Qam256};

  switch (cls) {
    case ClassId::LteDl:
      s.subcarrier_spacing_hz = 15e3;
      s.occupied_bandwidth_hz = rng.pick(std::vector<double>{0.5e6, 1.0e6, 1.5e6}) * scale;
      s.modulation = rng.pick(cellular_dl);
      s.occupancy = rng.uniform(0.01, 1.0);
      s.traffic_model = rng.coin() ? TrafficModel::Bursty : TrafficModel::Uniform;
      s.pilots = {6, 7, pilot_seed("lte_dl")};
      break;
    case ClassId::NrDl:
      s.subcarrier_spacing_hz = rng.pick(std::vector<double>{15e3, 30e3});
      s.occupied_bandwidth_hz = rng.pick(std::vector<double>{1.0e6, 1.5e6}) * scale;
      s.modulation = rng.pick(std::vector<Modulation>{Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64,
                                                      Modulation::Qam256});
      s.occupancy = rng.uniform(0.01, 1.0);
      s.traffic_model = rng.coin() ? TrafficModel::Bursty : TrafficModel::Uniform;
      s.pilots = {4, 14, pilot_seed("nr_dl")};
      break;
    case ClassId::LteUl:
      s.subcarrier_spacing_hz = 15e3;
      s.occupied_bandwidth_hz = rng.pick(std::vector<double>{0.5e6, 1.0e6}) * scale;
      s.modulation = rng.pick(cellular_dl);
      s.occupancy = rng.uniform(0.01, 1.0);
      s.traffic_model = rng.coin() ? TrafficModel::Bursty : TrafficModel::Uniform;
      s.pilots = {6, 7, pilot_seed("lte_ul")};
      s.dft_spread = true;
      break;
    case ClassId::NrUl:
      s.subcarrier_spacing_hz = rng.pick(std::vector<double>{15e3, 30e3});
      s.occupied_bandwidth_hz = rng.pick(std::vector<double>{0.75e6, 1.25e6}) * scale;
      s.modulation = rng.pick(std::vector<Modulation>{Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16,
                                                      Modulation::Qam64});
      s.occupancy = rng.uniform(0.01, 1.0);
      s.traffic_model = rng.coin() ? TrafficModel::Bursty : TrafficModel::Uniform;
      s.pilots = {4, 14, pilot_seed("nr_ul")};
      s.dft_spread = rng.coin();
      break;
    case ClassId::Wifi6:
      s.subcarrier_spacing_hz = 78.125e3;
      s.occupied_bandwidth_hz = rng.pick(std::vector<double>{1.0e6, 1.5e6}) * scale;
      s.modulation = rng.pick(std::vector<Modulation>{Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16,
                                                      Modulation::Qam64, Modulation::Qam256});
      s.occupancy = rng.uniform(0.5, 1.0);
      s.traffic_model = TrafficModel::Uniform;
      s.pilots = {7, 1, pilot_seed("wifi6")};
      s.bursts = {true, 200e-6, 2000e-6, 10e-6, 500e-6};
      break;
    case ClassId::Ble:
      s.subcarrier_spacing_hz = 0.0;
      s.occupied_bandwidth_hz = 1.2e6 * scale;
      s.modulation = Modulation::Gfsk;
      s.gfsk_bitrate_hz = sample_rate_hz / 4.0;
      s.gfsk_h = 0.5;
      s.gfsk_bt = 0.5;
      s.bursts = {true, 100e-6, 400e-6, 150e-6, 1500e-6};
      break;
    case ClassId::NbIot:
      s.subcarrier_spacing_hz = 15e3;
      s.occupied_bandwidth_hz = 12 * 15e3;  // exactly 12 subcarriers
      s.modulation = Modulation::Qpsk;
      s.occupancy = rng.uniform(0.01, 1.0);
      s.traffic_model = rng.coin() ? TrafficModel::Bursty : TrafficModel::Uniform;
      s.pilots = {6, 7, pilot_seed("nbiot")};
      break;
    case ClassId::GenericOfdm:
    case ClassId::GenericScFdma:
      s.subcarrier_spacing_hz = rng.pick(std::vector<double>{15e3, 30e3, 60e3});
      s.occupied_bandwidth_hz = rng.uniform(0.2, 0.8) * sample_rate_hz / 2.0;
      s.modulation = rng.pick(generic_mods);
      s.occupancy = 1.0;
      s.traffic_model = TrafficModel::Uniform;
      s.pilots = {0, 0, 0};
      s.dft_spread = cls == ClassId::GenericScFdma;
      break;
    case ClassId::GenericSc:
      s.subcarrier_spacing_hz = 0.0;
      s.occupied_bandwidth_hz = rng.uniform(0.2, 0.8) * sample_rate_hz / 2.0;
      s.modulation = rng.pick(generic_mods);
      s.rolloff = rng.uniform(0.15, 0.35);
      break;
    case ClassId::Am:
      s.subcarrier_spacing_hz = 0.0;
      s.occupied_bandwidth_hz = rng.uniform(0.2, 0.8) * sample_rate_hz / 2.0;
      s.modulation = rng.coin() ? Modulation::AmSsb : Modulation::AmDsb;
      s.am_depth = rng.uniform(0.3, 1.0);
      break;
    case ClassId::Fm:
      s.subcarrier_spacing_hz = 0.0;
      s.occupied_bandwidth_hz = rng.uniform(0.2, 0.8) * sample_rate_hz / 2.0;
      s.modulation = Modulation::Fm;
      break;
  }
  return s;
}

IqSignal gen_class_signal(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz) {
  const WaveformSpec spec = draw_class_spec(cls, duration_s, seed, sample_rate_hz);
  return generate(spec);
}

IqSignal gen_known_class(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz) {
  if (!is_known_class(cls)) throw InvalidSpec("gen_known_class: " + to_string(cls) + " is not a known class");
  return gen_class_signal(cls, duration_s, seed, sample_rate_hz);
}

ClassTraits known_class_traits(ClassId cls, double fs) {
  const double scale = fs / 3.84e6;
  switch (cls) {
    case ClassId::LteDl: return {{15e3}, {0.5e6 * scale, 1.0e6 * scale, 1.5e6 * scale}, false, false};
    case ClassId::NrDl: return {{15e3, 30e3}, {1.0e6 * scale, 1.5e6 * scale}, false, false};
    case ClassId::LteUl: return {{15e3}, {0.5e6 * scale, 1.0e6 * scale}, false, false};
    case ClassId::NrUl: return {{15e3, 30e3}, {0.75e6 * scale, 1.25e6 * scale}, false, false};
    case ClassId::Wifi6: return {{78.125e3}, {1.0e6 * scale, 1.5e6 * scale}, false, true};
    case ClassId::Ble: return {{}, {1.2e6 * scale}, true, true};
    case ClassId::NbIot: return {{15e3}, {180e3}, false, false};
    default:
      throw InvalidSpec("known_class_traits: not a known class");
  }
}

bool known_families_pairwise_distinct(double fs) {
  const auto& classes = all_known_classes();
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      const ClassTraits ta = known_class_traits(classes[a], fs);
      const ClassTraits tb = known_class_traits(classes[b], fs);
      const bool differs = ta.scs_hz != tb.scs_hz || ta.bandwidth_hz != tb.bandwidth_hz ||
                           ta.constant_envelope != tb.constant_envelope || ta.bursty_rf != tb.bursty_rf;
      if (!differs) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rational polyphase resampler
// ---------------------------------------------------------------------------

namespace {

double bessel_i0(double x) {
  // Series expansion; converges quickly for the beta values used here.
  double sum = 1.0, term = 1.0;
  const double x2 = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= x2 / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

void rational_approx(double ratio, std::uint64_t max_den, std::uint64_t& num, std::uint64_t& den) {
  // Continued-fraction best approximation.
  std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = ratio;
  for (int i = 0; i < 64; ++i) {
    const auto a = static_cast<std::uint64_t>(std::floor(x));
    const std::uint64_t p2 = a * p1 + p0;
    const std::uint64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = x - std::floor(x);
    if (frac < 1e-12) break;
    x = 1.0 / frac;
  }
  num = p1;
  den = q1;
}

}  // namespace

IqSignal resample(const IqSignal& sig, double target_rate_hz) {
  if (!(target_rate_hz > 0.0)) throw InvalidSpec("target rate must be positive");
  if (sig.samples.empty()) throw InvalidSpec("resample: empty signal");
  auto it = sig.meta.find("occupied_bandwidth_hz");
  if (it != sig.meta.end() && target_rate_hz < meta_get_num(sig.meta, "occupied_bandwidth_hz"))
    throw AliasingRisk("target rate below the signal's occupied bandwidth");
  if (target_rate_hz == sig.sample_rate_hz) {
    IqSignal out = sig;
    meta_set(out.meta, "resampled", 1.0);
    return out;
  }

  const double ratio = target_rate_hz / sig.sample_rate_hz;
  std::uint64_t up = 0, down = 0;
  rational_approx(ratio, 8192, up, down);
  if (up == 0 || down == 0) throw InvalidSpec("resample: cannot approximate rate ratio");

  // Kaiser-windowed sinc at the upsampled rate fs*up. Cutoff sits at 92% of
  // the narrower Nyquist band so the stopband starts at the band edge.
  const std::uint64_t wide = std::max(up, down);
  const double fc = 0.92 * 0.5 / static_cast<double>(wide);
  const std::size_t taps_per_side = 48 * wide;
  const double beta = 13.5;
  const double i0b = bessel_i0(beta);
  const auto n_taps = 2 * taps_per_side + 1;
  std::vector<double> h(n_taps);
  for (std::size_t i = 0; i < n_taps; ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(taps_per_side);
    const double x = t / static_cast<double>(taps_per_side);
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - x * x))) / i0b;
    const double s = t == 0.0 ? 2.0 * fc : std::sin(kTau * fc * t) / (M_PI * t);
    h[i] = w * s * static_cast<double>(up);
  }

  const auto in_len = static_cast<long>(sig.samples.size());
  const auto out_len = static_cast<std::size_t>(std::round(static_cast<double>(in_len) * ratio));
  std::vector<cd> out_samples(out_len, cd(0, 0));
  for (std::size_t j = 0; j < out_len; ++j) {
    const std::uint64_t p = j * down;  // position on the upsampled grid
    cd acc(0, 0);
    // Upsampled-grid index of input sample n is n*up; its contribution is
    // h[p - n*up + taps_per_side].
    const long n_hi = static_cast<long>((p + taps_per_side) / up);
    const long n_lo = static_cast<long>((p >= taps_per_side ? (p - taps_per_side + up - 1) / up : 0));
    for (long n = n_lo; n <= n_hi; ++n) {
      if (n < 0 || n >= in_len) continue;
      const long k = static_cast<long>(p) - n * static_cast<long>(up) + static_cast<long>(taps_per_side);
      if (k < 0 || k >= static_cast<long>(n_taps)) continue;
      acc += sig.samples[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(k)];
    }
    out_samples[j] = acc;
  }

  IqSignal out;
  out.samples = std::move(out_samples);
  out.sample_rate_hz = target_rate_hz;
  out.label = sig.label;
  out.meta = sig.meta;
  meta_set(out.meta, "resampled_from_hz", sig.sample_rate_hz);
  meta_set(out.meta, "resample_up", static_cast<double>(up));
  meta_set(out.meta, "resample_down", static_cast<double>(down));
  return out;
}

}  // namespace osrf
