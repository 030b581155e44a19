#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osrf/iq.hpp"

namespace osrf {

enum class Modulation { Bpsk, Qpsk, Psk16, Psk64, Qam16, Qam64, Qam256, Gfsk, AmDsb, AmSsb, Fm };

std::string to_string(Modulation mod);
Modulation modulation_from_string(const std::string& name);

// How data fills the resource grid of a multicarrier signal. Uniform draws
// each resource element independently; Bursty allocates whole slots of
// symbols at a time, so traffic arrives in contiguous blocks.
enum class TrafficModel { Uniform, Bursty };

// Pilot resource elements on a fixed grid with a fixed per-class symbol
// sequence. Pilots stand in for the synchronization/control structure the
// cellular-style classes carry; generic signals set sc_step = 0 (none).
struct PilotPattern {
  int sc_step = 0;
  int sym_step = 0;
  std::uint64_t sequence_seed = 0;
};

// RF on/off structure for packetized classes (WiFi-style frames, BLE
// advertising events). Durations are drawn uniformly per burst/gap.
struct BurstPlan {
  bool enabled = false;
  double on_min_s = 0.0;
  double on_max_s = 0.0;
  double gap_min_s = 0.0;
  double gap_max_s = 0.0;
};

struct WaveformSpec {
  ClassId class_id = ClassId::GenericOfdm;
  double sample_rate_hz = 3.84e6;
  double occupied_bandwidth_hz = 1.0e6;
  double subcarrier_spacing_hz = 15e3;  // 0: not applicable (single carrier, GFSK, analog)
  Modulation modulation = Modulation::Qpsk;
  double duration_s = 0.01;
  double occupancy = 1.0;  // fraction of the resource grid carrying data, in (0, 1]
  TrafficModel traffic_model = TrafficModel::Uniform;
  std::uint64_t seed = 0;

  // Knobs resolved by the class family tables; callers may also set them
  // directly when using the generators standalone.
  double cp_fraction = 0.07;  // cyclic prefix length / FFT length
  PilotPattern pilots;
  bool dft_spread = true;       // SC-FDMA precoding; gen_scfdma honors this flag
  double rolloff = 0.25;        // RRC roll-off for single carrier
  double gfsk_h = 0.5;          // GFSK modulation index
  double gfsk_bt = 0.5;         // Gaussian filter BT product
  double gfsk_bitrate_hz = 0.0; // 0: derived from occupied bandwidth
  double am_depth = 0.7;        // AM-DSB modulation depth, in [0, 1]
  double message_bw_fraction = 0.1;  // analog message bandwidth / occupied bandwidth
  BurstPlan bursts;
};

std::vector<cd> constellation_points(Modulation mod);

// Generators. Each is a pure function of its spec (seed included): the same
// spec yields bit-identical samples. Outputs are normalized to unit mean
// power over on-burst samples. All throw InvalidSpec on a bad spec.
IqSignal gen_ofdm(const WaveformSpec& spec);
IqSignal gen_scfdma(const WaveformSpec& spec);
IqSignal gen_sc(const WaveformSpec& spec);
IqSignal gen_gfsk(const WaveformSpec& spec);
IqSignal gen_analog(const WaveformSpec& spec);

// Dispatch on the modulation/class kind of the spec.
IqSignal generate(const WaveformSpec& spec);

// GFSK building block with explicit bits; gen_gfsk draws random bits and
// delegates here.
std::vector<cd> gfsk_modulate(const std::vector<int>& bits, double sample_rate_hz, double bitrate_hz,
                              double mod_index, double bt);

// Class families: draw a concrete spec from the class's parameter family so
// signals within a class vary while the class keeps its physical signature.
WaveformSpec draw_class_spec(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz);

// Family draw + generation + labeling for any class.
IqSignal gen_class_signal(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz);

// Same, restricted to the seven training classes.
IqSignal gen_known_class(ClassId cls, double duration_s, std::uint64_t seed, double sample_rate_hz);

// Axes on which the known-class families are told apart. A startup sanity
// check asserts every pair of families differs somewhere.
struct ClassTraits {
  std::vector<double> scs_hz;        // empty: not multicarrier
  std::vector<double> bandwidth_hz;  // family values at the given sample rate
  bool constant_envelope = false;
  bool bursty_rf = false;
};
ClassTraits known_class_traits(ClassId cls, double sample_rate_hz);
bool known_families_pairwise_distinct(double sample_rate_hz);

// Rational polyphase resampling. Content within ~80% of the narrower Nyquist
// band is preserved; throws AliasingRisk when the target rate cannot carry
// the signal's occupied bandwidth (known from meta).
IqSignal resample(const IqSignal& sig, double target_rate_hz);

}  // namespace osrf
