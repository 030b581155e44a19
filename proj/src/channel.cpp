#include "osrf/channel.hpp"

#include <algorithm>
#include <cmath>

#include "osrf/errors.hpp"
#include "osrf/rng.hpp"

namespace osrf {

namespace {

constexpr double kTau = 2.0 * M_PI;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

std::string to_string(FadingKind kind) {
  switch (kind) {
    case FadingKind::None: return "none";
    case FadingKind::Rayleigh: return "rayleigh";
    case FadingKind::Rician: return "rician";
  }
  return "?";
}

void ChannelProfile::validate() const {
  if (fading == FadingKind::None) return;
  if (path_delays_s.empty() || path_delays_s.size() != path_gains_db.size())
    throw InvalidProfile("path delays and gains must be non-empty and the same length");
  if (path_delays_s.front() != 0.0) throw InvalidProfile("first path delay must be 0");
  for (std::size_t i = 1; i < path_delays_s.size(); ++i) {
    if (path_delays_s[i] <= path_delays_s[i - 1]) throw InvalidProfile("path delays must be ascending");
  }
  if (max_doppler_hz < 0.0) throw InvalidProfile("max doppler must be non-negative");
  if (fading == FadingKind::Rician && !std::isfinite(k_factor_db))
    throw InvalidProfile("Rician profile needs a finite K factor");
}

ChannelProfile ChannelProfile::rayleigh(std::uint64_t seed) {
  ChannelProfile p;
  p.fading = FadingKind::Rayleigh;
  p.seed = seed;
  return p;
}

ChannelProfile ChannelProfile::rician(std::uint64_t seed, double k_factor_db) {
  ChannelProfile p;
  p.fading = FadingKind::Rician;
  p.k_factor_db = k_factor_db;
  p.seed = seed;
  return p;
}

cd TapProcess::at(std::uint64_t n) const {
  cd acc(0, 0);
  for (int i = 0; i < kNumCisoids; ++i) {
    const double ang = omega[i] * static_cast<double>(n);
    acc += weights[i] * cd(std::cos(ang), std::sin(ang));
  }
  acc *= diffuse_scale;
  if (los_scale != 0.0) {
    const double ang = los_omega * static_cast<double>(n) + los_phase;
    acc += los_scale * cd(std::cos(ang), std::sin(ang));
  }
  return acc;
}

std::vector<TapProcess> make_tap_processes(const ChannelProfile& profile, double sample_rate_hz) {
  profile.validate();
  Rng rng(profile.seed);
  const std::size_t n_taps = profile.path_delays_s.size();
  std::vector<TapProcess> taps(n_taps);
  const double k_lin = profile.fading == FadingKind::Rician ? db_to_linear(profile.k_factor_db) : 0.0;
  for (std::size_t t = 0; t < n_taps; ++t) {
    TapProcess& tp = taps[t];
    const double norm = 1.0 / std::sqrt(static_cast<double>(TapProcess::kNumCisoids));
    for (int i = 0; i < TapProcess::kNumCisoids; ++i) {
      tp.weights[i] = rng.complex_normal() * norm;
      const double arrival = rng.uniform(0.0, kTau);
      tp.omega[i] = kTau * profile.max_doppler_hz * std::cos(arrival) / sample_rate_hz;
    }
    if (profile.fading == FadingKind::Rician && t == 0) {
      tp.diffuse_scale = std::sqrt(1.0 / (k_lin + 1.0));
      tp.los_scale = std::sqrt(k_lin / (k_lin + 1.0));
      tp.los_omega = kTau * profile.max_doppler_hz * std::cos(rng.uniform(0.0, kTau)) / sample_rate_hz;
      tp.los_phase = rng.uniform(0.0, kTau);
    }
  }
  return taps;
}

IqSignal apply_fading(const IqSignal& sig, const ChannelProfile& profile) {
  profile.validate();
  if (sig.samples.empty()) throw InvalidProfile("apply_fading: empty signal");
  if (profile.fading == FadingKind::None) return sig;

  const std::vector<TapProcess> taps = make_tap_processes(profile, sig.sample_rate_hz);
  const std::size_t n_taps = taps.size();

  // Per-tap linear powers, normalized to unit total channel power.
  std::vector<double> power(n_taps);
  double total = 0.0;
  for (std::size_t t = 0; t < n_taps; ++t) {
    power[t] = db_to_linear(profile.path_gains_db[t]);
    total += power[t];
  }
  std::vector<double> amp(n_taps);
  std::vector<std::size_t> delay(n_taps);
  for (std::size_t t = 0; t < n_taps; ++t) {
    amp[t] = std::sqrt(power[t] / total);
    delay[t] = static_cast<std::size_t>(std::round(profile.path_delays_s[t] * sig.sample_rate_hz));
  }

  const std::size_t n = sig.samples.size();
  std::vector<cd> out(n, cd(0, 0));
  // Incremental cisoid rotation; re-synced periodically against drift.
  constexpr std::size_t kResync = 8192;
  for (std::size_t t = 0; t < n_taps; ++t) {
    const TapProcess& tp = taps[t];
    std::array<cd, TapProcess::kNumCisoids> state;
    std::array<cd, TapProcess::kNumCisoids> rot;
    for (int i = 0; i < TapProcess::kNumCisoids; ++i) {
      state[i] = tp.weights[i];
      rot[i] = cd(std::cos(tp.omega[i]), std::sin(tp.omega[i]));
    }
    cd los_state(std::cos(tp.los_phase), std::sin(tp.los_phase));
    const cd los_rot(std::cos(tp.los_omega), std::sin(tp.los_omega));
    const std::size_t d = delay[t];
    for (std::size_t i = 0; i < n; ++i) {
      if (i != 0 && i % kResync == 0) {
        for (int c = 0; c < TapProcess::kNumCisoids; ++c) {
          const double ang = tp.omega[c] * static_cast<double>(i);
          state[c] = tp.weights[c] * cd(std::cos(ang), std::sin(ang));
        }
        const double ang = tp.los_omega * static_cast<double>(i) + tp.los_phase;
        los_state = cd(std::cos(ang), std::sin(ang));
      }
      cd g(0, 0);
      for (int c = 0; c < TapProcess::kNumCisoids; ++c) {
        g += state[c];
        state[c] *= rot[c];
      }
      g *= tp.diffuse_scale;
      if (tp.los_scale != 0.0) {
        g += tp.los_scale * los_state;
        los_state *= los_rot;
      }
      if (i >= d) out[i] += amp[t] * g * sig.samples[i - d];
    }
  }

  IqSignal res;
  res.samples = std::move(out);
  res.sample_rate_hz = sig.sample_rate_hz;
  res.label = sig.label;
  res.meta = sig.meta;
  meta_set(res.meta, "fading", to_string(profile.fading));
  if (profile.fading == FadingKind::Rician) meta_set(res.meta, "k_factor_db", profile.k_factor_db);
  return res;
}

IqSignal apply_iq_imbalance(const IqSignal& sig, double gain_db) {
  if (!std::isfinite(gain_db)) throw InvalidProfile("iq imbalance gain must be finite");
  const double g = std::pow(10.0, gain_db / 20.0);
  IqSignal out = sig;
  for (cd& s : out.samples) s = cd(s.real() * g, s.imag());
  return out;
}

IqSignal apply_freq_offset(const IqSignal& sig, double offset_hz) {
  if (!(std::abs(offset_hz) < sig.sample_rate_hz / 2.0))
    throw OffsetOutOfRange("frequency offset beyond half the sample rate");
  IqSignal out = sig;
  const double w = kTau * offset_hz / sig.sample_rate_hz;
  const cd rot(std::cos(w), std::sin(w));
  cd phasor(1.0, 0.0);
  constexpr std::size_t kResync = 4096;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    if (n != 0 && n % kResync == 0) {
      const double ang = w * static_cast<double>(n);
      phasor = cd(std::cos(ang), std::sin(ang));
    }
    out.samples[n] *= phasor;
    phasor *= rot;
  }
  return out;
}

IqSignal apply_awgn(const IqSignal& sig, double snr_db, std::uint64_t seed) {
  if (snr_db == kNoNoise) return sig;
  const double p = mean_power_on_burst(sig.samples);
  if (p <= 0.0) throw ZeroPowerSignal("apply_awgn: signal has zero power");
  const double sigma = std::sqrt(p / db_to_linear(snr_db));
  Rng rng(seed);
  IqSignal out = sig;
  for (cd& s : out.samples) s += sigma * rng.complex_normal();
  return out;
}

void ImpairmentConfig::validate() const {
  if (iq_gain_db_range[0] > iq_gain_db_range[1]) throw InvalidProfile("iq gain range is empty");
  if (freq_offset_hz_range[0] > freq_offset_hz_range[1]) throw InvalidProfile("frequency offset range is empty");
  if (profile.fading != FadingKind::None) profile.validate();
}

IqSignal augment(const IqSignal& sig, const ImpairmentConfig& config) {
  config.validate();

  FadingKind kind = config.profile.fading;
  if (config.mix_fading && kind != FadingKind::None) {
    kind = Rng(derive_seed(config.seed, "fading-kind")).coin() ? FadingKind::Rician : FadingKind::Rayleigh;
  }
  const double gain_db =
      Rng(derive_seed(config.seed, "iq-gain")).uniform(config.iq_gain_db_range[0], config.iq_gain_db_range[1]);
  const double offset_hz = Rng(derive_seed(config.seed, "freq-offset"))
                               .uniform(config.freq_offset_hz_range[0], config.freq_offset_hz_range[1]);

  IqSignal out;
  if (kind != FadingKind::None) {
    ChannelProfile p = config.profile;
    p.fading = kind;
    p.seed = derive_seed(config.seed, "fading");
    out = apply_fading(sig, p);
  } else {
    out = sig;
  }
  out = apply_iq_imbalance(out, gain_db);
  out = apply_freq_offset(out, offset_hz);
  out = apply_awgn(out, config.snr_db, derive_seed(config.seed, "awgn"));

  meta_set(out.meta, "fading", to_string(kind));
  if (kind == FadingKind::Rician) meta_set(out.meta, "k_factor_db", config.profile.k_factor_db);
  meta_set(out.meta, "iq_gain_db", gain_db);
  meta_set(out.meta, "freq_offset_hz", offset_hz);
  meta_set(out.meta, "snr_db", config.snr_db);
  return out;
}

}  // namespace osrf
