#include "osrf/iq.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace osrf {

namespace {

const std::array<const char*, kNumClassIds> kClassNames = {
    "lte_dl", "nr_dl",         "lte_ul",        "nr_ul",      "wifi6", "ble",
    "nbiot",  "generic_ofdm",  "generic_scfdma", "generic_sc", "am",    "fm",
};

}  // namespace

bool is_known_class(ClassId id) { return static_cast<int>(id) < 7; }

const std::vector<ClassId>& all_known_classes() {
  static const std::vector<ClassId> v = {ClassId::LteDl, ClassId::NrDl,  ClassId::LteUl, ClassId::NrUl,
                                         ClassId::Wifi6, ClassId::Ble,   ClassId::NbIot};
  return v;
}

const std::vector<ClassId>& all_unknown_classes() {
  static const std::vector<ClassId> v = {ClassId::GenericOfdm, ClassId::GenericScFdma, ClassId::GenericSc,
                                         ClassId::Am, ClassId::Fm};
  return v;
}

std::string to_string(ClassId id) { return kClassNames[static_cast<int>(id)]; }

ClassId class_id_from_string(const std::string& name) {
  for (int i = 0; i < kNumClassIds; ++i) {
    if (name == kClassNames[i]) return static_cast<ClassId>(i);
  }
  throw std::invalid_argument("unknown class name: " + name);
}

void meta_set(Meta& m, const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  m[key] = buf;
}

void meta_set(Meta& m, const std::string& key, const std::string& value) { m[key] = value; }

double meta_get_num(const Meta& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw std::out_of_range("meta key not found: " + key);
  return std::stod(it->second);
}

double mean_power(const std::vector<cd>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const cd& s : samples) acc += std::norm(s);
  return acc / static_cast<double>(samples.size());
}

double mean_power_on_burst(const std::vector<cd>& samples) {
  double peak = 0.0;
  for (const cd& s : samples) peak = std::max(peak, std::norm(s));
  if (peak == 0.0) return 0.0;
  const double gate = 0.01 * peak;
  double acc = 0.0;
  std::size_t n = 0;
  for (const cd& s : samples) {
    const double p = std::norm(s);
    if (p > gate) {
      acc += p;
      ++n;
    }
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

void normalize_power(IqSignal& sig) {
  const double p = mean_power_on_burst(sig.samples);
  if (p <= 0.0) return;
  const double scale = 1.0 / std::sqrt(p);
  for (cd& s : sig.samples) s *= scale;
}

}  // namespace osrf
