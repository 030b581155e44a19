#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "osrf/channel.hpp"
#include "osrf/errors.hpp"
#include "osrf/rng.hpp"
#include "osrf/waveform.hpp"
#include "test_util.hpp"

using namespace osrf;
using namespace osrf_test;

namespace {

IqSignal unit_tone(std::size_t n, double fs) {
  IqSignal sig;
  sig.sample_rate_hz = fs;
  sig.samples.assign(n, cd(1.0, 0.0));
  return sig;
}

IqSignal test_signal(std::size_t seed = 61) {
  return gen_class_signal(ClassId::LteDl, 0.004, seed, 3.84e6);
}

bool same_samples(const IqSignal& a, const IqSignal& b) {
  return a.samples.size() == b.samples.size() &&
         std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(cd)) == 0;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("fading None is the identity") {
  const IqSignal sig = test_signal();
  ChannelProfile p;
  p.fading = FadingKind::None;
  CHECK(same_samples(apply_fading(sig, p), sig));
}

TEST_CASE("single Rayleigh tap envelope follows the Rayleigh law (KS test)") {
  ChannelProfile p = ChannelProfile::rayleigh(0);
  p.path_delays_s = {0.0};
  p.path_gains_db = {0.0};
  p.max_doppler_hz = 50.0;

  const std::size_t n = 100000;
  std::vector<double> env(n);
  Rng time_rng(7101);
  for (std::size_t i = 0; i < n; ++i) {
    p.seed = 900000 + i;
    const std::vector<TapProcess> taps = make_tap_processes(p, 3.84e6);
    env[i] = std::abs(taps[0].at(time_rng.uniform_int(100000)));
  }
  std::sort(env.begin(), env.end());
  // Rayleigh CDF for unit mean-square envelope: F(r) = 1 - exp(-r^2).
  double d_stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-env[i] * env[i]);
    d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i) / n));
    d_stat = std::max(d_stat, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // alpha = 0.01
  CHECK(d_stat < critical);
}

TEST_CASE("huge Rician K pins the channel to the line of sight") {
  const IqSignal sig = unit_tone(20000, 3.84e6);
  ChannelProfile p = ChannelProfile::rician(77, 60.0);
  p.path_delays_s = {0.0};
  p.path_gains_db = {0.0};
  const IqSignal out = apply_fading(sig, p);
  double mean = 0.0;
  for (const cd& s : out.samples) mean += std::abs(s);
  mean /= static_cast<double>(out.samples.size());
  double var = 0.0;
  for (const cd& s : out.samples) var += (std::abs(s) - mean) * (std::abs(s) - mean);
  var /= static_cast<double>(out.samples.size());
  CHECK(var < 1e-4);
}

TEST_CASE("fading preserves expected power over realizations") {
  const IqSignal sig = test_signal(63);
  const double pin = mean_power(sig.samples);
  double pout = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    pout += mean_power(apply_fading(sig, ChannelProfile::rayleigh(seed)).samples);
  }
  pout /= 100.0;
  CHECK(pout == doctest::Approx(pin).epsilon(0.05));
}

TEST_CASE("iq imbalance scales only the real part") {
  IqSignal sig;
  sig.sample_rate_hz = 1.0e6;
  sig.samples = {cd(1.0, 1.0), cd(2.0, 4.0)};

  const IqSignal id = apply_iq_imbalance(sig, 0.0);
  CHECK(same_samples(id, sig));

  const IqSignal up = apply_iq_imbalance(sig, 6.0206);  // linear 2.0
  CHECK(std::abs(up.samples[0] - cd(2.0, 1.0)) < 1e-4);

  const IqSignal down = apply_iq_imbalance(sig, -6.0206);  // linear 0.5
  CHECK(std::abs(down.samples[1] - cd(1.0, 4.0)) < 1e-4);
}

TEST_CASE("frequency offset shifts a tone into the expected bin and inverts exactly") {
  const double fs = 1.024e6;
  const IqSignal dc = unit_tone(8192, fs);

  CHECK(same_samples(apply_freq_offset(dc, 0.0), dc));

  const IqSignal shifted = apply_freq_offset(dc, 1000.0);
  const auto ps = hann_power_spectrum(shifted.samples);
  const std::size_t peak_bin = static_cast<std::size_t>(std::max_element(ps.begin(), ps.end()) - ps.begin());
  const double peak_hz =
      (static_cast<double>(peak_bin) - static_cast<double>(ps.size() / 2)) * fs / static_cast<double>(ps.size());
  CHECK(std::abs(peak_hz - 1000.0) <= fs / static_cast<double>(ps.size()));

  const IqSignal sig = test_signal(67);
  const IqSignal round = apply_freq_offset(apply_freq_offset(sig, 1234.5), -1234.5);
  CHECK(rms_error(round.samples, sig.samples) < 1e-9);

  CHECK_THROWS_AS(apply_freq_offset(sig, 3.84e6), OffsetOutOfRange);
}

TEST_CASE("awgn adds the requested noise power") {
  const IqSignal sig = unit_tone(100000, 3.84e6);

  CHECK(same_samples(apply_awgn(sig, kNoNoise, 1), sig));

  const IqSignal at0 = apply_awgn(sig, 0.0, 2);
  double noise_power = 0.0;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) noise_power += std::norm(at0.samples[i] - sig.samples[i]);
  noise_power /= static_cast<double>(sig.samples.size());
  CHECK(noise_power == doctest::Approx(1.0).epsilon(0.02));

  const IqSignal at10 = apply_awgn(sig, 10.0, 3);
  CHECK(mean_power(at10.samples) == doctest::Approx(1.1).epsilon(0.02));

  IqSignal silent;
  silent.sample_rate_hz = 1.0;
  silent.samples.assign(16, cd(0, 0));
  CHECK_THROWS_AS(apply_awgn(silent, 10.0, 4), ZeroPowerSignal);
}

TEST_CASE("awgn noise is white: autocorrelation vanishes at lags 1..10") {
  const IqSignal sig = unit_tone(100000, 3.84e6);
  const IqSignal noisy = apply_awgn(sig, 0.0, 5);
  std::vector<cd> noise(sig.samples.size());
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples[i] - sig.samples[i];
  double denom = 0.0;
  for (const cd& v : noise) denom += std::norm(v);
  for (std::size_t lag = 1; lag <= 10; ++lag) {
    cd acc(0, 0);
    for (std::size_t i = 0; i + lag < noise.size(); ++i) acc += noise[i] * std::conj(noise[i + lag]);
    CHECK(std::abs(acc) / denom < 0.02);
  }
}

TEST_CASE("augment with degenerate settings is the identity") {
  const IqSignal sig = test_signal(71);
  ImpairmentConfig cfg;
  cfg.profile.fading = FadingKind::None;
  cfg.iq_gain_db_range = {0.0, 0.0};
  cfg.freq_offset_hz_range = {0.0, 0.0};
  cfg.snr_db = kNoNoise;
  cfg.seed = 9;
  CHECK(same_samples(augment(sig, cfg), sig));
}

TEST_CASE("augment is deterministic and length-preserving") {
  const IqSignal sig = test_signal(73);
  ImpairmentConfig cfg;
  cfg.profile = ChannelProfile::rayleigh(0);
  cfg.mix_fading = true;
  cfg.snr_db = 10.0;
  cfg.seed = 12345;
  const IqSignal a = augment(sig, cfg);
  const IqSignal b = augment(sig, cfg);
  CHECK(same_samples(a, b));
  CHECK(a.samples.size() == sig.samples.size());
  cfg.seed = 12346;
  CHECK(!same_samples(augment(sig, cfg), a));
}

TEST_CASE("augment applies the stages in the fixed order with derived seeds") {
  const IqSignal sig = test_signal(79);
  ImpairmentConfig cfg;
  cfg.profile = ChannelProfile::rayleigh(0);
  cfg.mix_fading = false;
  cfg.iq_gain_db_range = {2.5, 2.5};
  cfg.freq_offset_hz_range = {-800.0, -800.0};
  cfg.snr_db = 15.0;
  cfg.seed = 5150;

  ChannelProfile p = cfg.profile;
  p.seed = derive_seed(cfg.seed, "fading");
  IqSignal manual = apply_fading(sig, p);
  manual = apply_iq_imbalance(manual, 2.5);
  manual = apply_freq_offset(manual, -800.0);
  manual = apply_awgn(manual, 15.0, derive_seed(cfg.seed, "awgn"));

  const IqSignal chained = augment(sig, cfg);
  CHECK(same_samples(chained, manual));
  CHECK(meta_get_num(chained.meta, "iq_gain_db") == doctest::Approx(2.5));
  CHECK(meta_get_num(chained.meta, "freq_offset_hz") == doctest::Approx(-800.0));
  CHECK(meta_get_num(chained.meta, "snr_db") == doctest::Approx(15.0));
  CHECK(chained.meta.at("fading") == "rayleigh");
}

TEST_CASE("augment draws cover the configured ranges uniformly") {
  const IqSignal sig = unit_tone(64, 3.84e6);
  ImpairmentConfig cfg;
  cfg.profile.fading = FadingKind::None;
  cfg.snr_db = kNoNoise;
  double gain_min = 1e9, gain_max = -1e9, off_min = 1e9, off_max = -1e9;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    cfg.seed = i;
    const IqSignal out = augment(sig, cfg);
    const double g = meta_get_num(out.meta, "iq_gain_db");
    const double f = meta_get_num(out.meta, "freq_offset_hz");
    REQUIRE(g >= -3.0);
    REQUIRE(g <= 3.0);
    REQUIRE(f >= -2500.0);
    REQUIRE(f <= 2500.0);
    gain_min = std::min(gain_min, g);
    gain_max = std::max(gain_max, g);
    off_min = std::min(off_min, f);
    off_max = std::max(off_max, f);
  }
  // Empirical extremes should reach within 5% of the range ends.
  CHECK(gain_min < -3.0 + 0.05 * 6.0);
  CHECK(gain_max > 3.0 - 0.05 * 6.0);
  CHECK(off_min < -2500.0 + 0.05 * 5000.0);
  CHECK(off_max > 2500.0 - 0.05 * 5000.0);
}

TEST_CASE("mixed fading picks both kinds across seeds") {
  const IqSignal sig = test_signal(83);
  ImpairmentConfig cfg;
  cfg.profile = ChannelProfile::rayleigh(0);
  cfg.mix_fading = true;
  cfg.snr_db = kNoNoise;
  std::size_t rayleigh = 0, rician = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    cfg.seed = i;
    const IqSignal out = augment(sig, cfg);
    if (out.meta.at("fading") == "rayleigh") ++rayleigh;
    if (out.meta.at("fading") == "rician") ++rician;
  }
  CHECK(rayleigh + rician == 200);
  CHECK(rayleigh > 60);
  CHECK(rician > 60);
}

TEST_CASE("profile validation rejects malformed profiles") {
  ChannelProfile p = ChannelProfile::rayleigh(0);
  p.path_delays_s = {0.0, 2e-6, 1e-6};
  p.path_gains_db = {0.0, -1.0, -2.0};
  CHECK_THROWS_AS(p.validate(), InvalidProfile);
  p = ChannelProfile::rayleigh(0);
  p.path_delays_s = {1e-6, 2e-6, 3e-6};
  CHECK_THROWS_AS(p.validate(), InvalidProfile);
  p = ChannelProfile::rician(0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(p.validate(), InvalidProfile);
}

TEST_SUITE_END();
