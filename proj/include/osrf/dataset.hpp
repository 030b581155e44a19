#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osrf/channel.hpp"
#include "osrf/features.hpp"
#include "osrf/nn.hpp"

namespace osrf {

struct ClassPlan {
  std::string name;
  bool known = true;
  std::size_t base_signals = 100;
};

// Everything a dataset build needs, and everything a reader needs to know
// about how the records were produced. Serialized as JSON into the container
// head and mirrored as a human-readable sidecar.
struct DatasetManifest {
  int schema_version = 1;
  double sample_rate_hz = 3.84e6;
  double duration_s = 0.01;
  std::vector<ClassPlan> classes;
  SliceConfig slice;
  std::array<double, 3> split{0.8, 0.1, 0.1};  // train/val/test fractions
  std::uint64_t seed = 1;

  std::array<double, 2> snr_train_db{-10.0, 20.0};
  std::array<double, 2> iq_gain_db{-3.0, 3.0};
  std::array<double, 2> freq_offset_hz{-2500.0, 2500.0};
  std::string fading = "mix";  // none | rayleigh | rician | mix
  double max_doppler_hz = 50.0;
  double rician_k_db = 10.0;
  std::vector<double> path_delays_s{0.0, 0.5e-6, 1.2e-6};
  std::vector<double> path_gains_db{0.0, -3.0, -6.0};
  bool keep_iq = false;

  void validate() const;  // throws InvalidManifest
  std::string to_json_text() const;
  static DatasetManifest from_json_text(const std::string& text);

  std::vector<std::string> known_class_names() const;
  ImpairmentConfig impairment_template() const;  // snr/seed filled per record
};

enum class Split { Train, Val, Test };
std::string to_string(Split s);

struct Record {
  std::uint32_t class_id = 0;       // global ClassId value
  std::uint64_t base_seed = 0;      // seed of the base signal (leakage audits)
  std::uint32_t base_index = 0;
  std::uint32_t slice_index = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  double sample_rate_hz = 0.0;
  double snr_db = 0.0;
  double iq_gain_db = 0.0;
  double freq_offset_hz = 0.0;
  std::uint32_t fading_kind = 0;    // FadingKind value
  double k_factor_db = 0.0;
  std::vector<float> features;      // rows*cols, row-major
  std::vector<float> iq;            // interleaved I,Q of the clean slice; may be empty
};

struct BuildSummary {
  std::map<std::string, std::size_t> records_per_split;
  std::map<std::string, std::uint32_t> file_crc;  // split name -> trailing CRC-32
};

// Deterministic dataset build: generates the base signals, splits them
// BEFORE slicing so no base signal straddles splits, bootstrap-slices,
// impairs with per-record derived seeds, preprocesses, and writes one
// container per split plus a manifest sidecar. Val/test records retain the
// clean slice I/Q so evaluation can re-impair at arbitrary SNR; train
// records do so only when keep_iq is set.
BuildSummary build_dataset(const DatasetManifest& manifest, const std::string& out_dir,
                           std::size_t threads = 0);

// Streaming record reader; validates per-record checksums as it goes and the
// trailing file checksum at the end.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string& path);
  ~DatasetReader();
  DatasetReader(DatasetReader&&) noexcept;
  DatasetReader& operator=(DatasetReader&&) = delete;

  const DatasetManifest& manifest() const { return manifest_; }
  const std::string& split_name() const { return split_name_; }
  std::size_t record_count() const { return record_count_; }
  bool next(Record& out);  // false at end of file

 private:
  struct Impl;
  Impl* impl_;
  DatasetManifest manifest_;
  std::string split_name_;
  std::size_t record_count_ = 0;
};

std::string split_path(const std::string& dataset_dir, Split split);
DatasetManifest load_manifest(const std::string& dataset_dir);

// Training view: features + label index over the manifest's known classes.
std::vector<nn::Example> load_split_features(const std::string& dataset_dir, Split split);

// Evaluation view: clean slices for re-impairment. known_index is the index
// into the manifest's known classes, or -1 for unknown-class records.
struct EvalExample {
  IqSignal clean_slice;
  std::string class_name;
  int known_index = -1;
};
std::vector<EvalExample> load_split_raw(const std::string& dataset_dir, Split split);

}  // namespace osrf
