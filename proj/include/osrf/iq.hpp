#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osrf/fft.hpp"

namespace osrf {

// The twelve signal classes the toolkit can synthesize. The first seven are
// the labeled classes a classifier trains on; the rest only ever appear at
// evaluation time as out-of-set signals.
enum class ClassId {
  LteDl,
  NrDl,
  LteUl,
  NrUl,
  Wifi6,
  Ble,
  NbIot,
  GenericOfdm,
  GenericScFdma,
  GenericSc,
  Am,
  Fm,
};

inline constexpr int kNumClassIds = 12;

bool is_known_class(ClassId id);
const std::vector<ClassId>& all_known_classes();
const std::vector<ClassId>& all_unknown_classes();
std::string to_string(ClassId id);
ClassId class_id_from_string(const std::string& name);

// String-keyed metadata bag. Numeric values are stored with 17 significant
// digits so they round-trip exactly.
using Meta = std::map<std::string, std::string>;
void meta_set(Meta& m, const std::string& key, double value);
void meta_set(Meta& m, const std::string& key, const std::string& value);
double meta_get_num(const Meta& m, const std::string& key);

// Complex baseband recording plus provenance. `label` is empty for signals
// that have not been attributed to a class (e.g. operator captures).
struct IqSignal {
  std::vector<cd> samples;
  double sample_rate_hz = 0.0;
  std::optional<ClassId> label;
  Meta meta;
};

double mean_power(const std::vector<cd>& samples);

// Mean power over on-burst samples only: |s|^2 > 1% of the peak. For
// continuous signals this equals mean_power. Returns 0 for all-zero input.
double mean_power_on_burst(const std::vector<cd>& samples);

// Scale so on-burst mean power is 1. No-op on all-zero input.
void normalize_power(IqSignal& sig);

}  // namespace osrf
