#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "osrf/iq.hpp"

namespace osrf {

enum class FadingKind { None, Rayleigh, Rician };

std::string to_string(FadingKind kind);

struct ChannelProfile {
  FadingKind fading = FadingKind::None;
  double k_factor_db = 10.0;  // Rician line-of-sight to diffuse power ratio
  std::vector<double> path_delays_s = {0.0, 0.5e-6, 1.2e-6};
  std::vector<double> path_gains_db = {0.0, -3.0, -6.0};
  double max_doppler_hz = 50.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidProfile

  static ChannelProfile rayleigh(std::uint64_t seed);
  static ChannelProfile rician(std::uint64_t seed, double k_factor_db = 10.0);
};

// One tap of the time-varying channel: a Gaussian-weighted sum of cisoids
// whose Doppler shifts come from uniformly drawn arrival angles (ring of
// scatterers). At every time index the diffuse part is exactly complex
// Gaussian, so a Rayleigh tap's envelope is exactly Rayleigh-distributed.
struct TapProcess {
  static constexpr int kNumCisoids = 16;
  std::array<cd, kNumCisoids> weights;
  std::array<double, kNumCisoids> omega;  // rad/sample
  double diffuse_scale = 1.0;
  double los_scale = 0.0;
  double los_omega = 0.0;
  double los_phase = 0.0;

  // Direct evaluation at an arbitrary sample index (used by tests; the
  // filtering path uses incremental rotation).
  cd at(std::uint64_t n) const;
};

// Build the tap processes for a profile; draw order is fixed (tap 0 first).
std::vector<TapProcess> make_tap_processes(const ChannelProfile& profile, double sample_rate_hz);

// Tapped-delay-line fading. Output length equals input length; expected
// output power equals input power (unit total tap power).
IqSignal apply_fading(const IqSignal& sig, const ChannelProfile& profile);

// Scales the real part by 10^(gain_db/20); imaginary part untouched.
IqSignal apply_iq_imbalance(const IqSignal& sig, double gain_db);

// Multiplies sample n by exp(+j 2 pi offset n / fs).
IqSignal apply_freq_offset(const IqSignal& sig, double offset_hz);

// No-noise sentinel for apply_awgn / ImpairmentConfig.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

// Adds circularly symmetric complex Gaussian noise at the given SNR. The
// signal power reference is measured over on-burst samples so bursty and
// continuous classes get comparable SNR.
IqSignal apply_awgn(const IqSignal& sig, double snr_db, std::uint64_t seed);

struct ImpairmentConfig {
  std::array<double, 2> iq_gain_db_range{-3.0, 3.0};
  std::array<double, 2> freq_offset_hz_range{-2500.0, 2500.0};
  double snr_db = kNoNoise;
  ChannelProfile profile;
  bool mix_fading = false;  // draw Rayleigh/Rician 50/50 per call (seeded)
  std::uint64_t seed = 0;

  void validate() const;
};

// The full impairment chain in fixed order: fading, I/Q imbalance, frequency
// offset, AWGN. Gain and offset are drawn uniformly from the configured
// ranges; all draws and stage seeds derive from config.seed, and the drawn
// values are recorded in the output meta.
IqSignal augment(const IqSignal& sig, const ImpairmentConfig& config);

}  // namespace osrf
