#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "osrf/dataset.hpp"
#include "osrf/eval.hpp"

namespace osrf {

// One config object drives the whole pipeline. Loaded from strict JSON
// (unknown keys are rejected at every level), with command-line flags
// layered on top: flags > file > defaults.
struct RunConfig {
  std::string preset = "desk-scale";  // or "paper-scale"
  double sample_rate_hz = 3.84e6;
  double duration_s = 0.01;
  std::vector<std::string> known_classes = {"lte_dl", "nr_dl", "lte_ul", "nr_ul", "wifi6", "ble", "nbiot"};
  std::vector<std::string> unknown_classes = {"generic_ofdm", "generic_scfdma", "generic_sc", "am", "fm"};
  std::size_t base_signals_per_class = 100;
  SliceConfig slice;
  std::array<double, 3> split{0.8, 0.1, 0.1};

  std::array<double, 2> snr_train_db{-10.0, 20.0};
  std::array<double, 2> iq_gain_db{-3.0, 3.0};
  std::array<double, 2> freq_offset_hz{-2500.0, 2500.0};
  std::string fading = "mix";
  double max_doppler_hz = 50.0;
  double rician_k_db = 10.0;
  std::vector<double> path_delays_s{0.0, 0.5e-6, 1.2e-6};
  std::vector<double> path_gains_db{0.0, -3.0, -6.0};
  bool keep_iq = false;

  std::string architecture = "conv:16,relu,pool:4,conv:32,relu,pool:4,conv:64,relu,pool:4,dense:128,relu";
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::string loss = "cce";

  double threshold = 0.9999;
  std::vector<double> sweep_grid = {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 1.0};
  std::vector<double> snr_grid_db = {-20, -15, -10, -5, 0, 5, 10, 15, 20};
  double confusion_snr_db = 10.0;
  double sweep_snr_db = 10.0;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t threads = 0;      // 0: hardware concurrency
  bool deterministic = false;   // forces single-threaded execution

  void validate() const;  // throws InvalidConfig
  std::string to_json_text() const;
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);

  DatasetManifest manifest() const;
  EvalConfig eval_config() const;
  nn::TrainConfig train_config() const;
  std::size_t effective_threads() const { return deterministic ? 1 : threads; }
};

}  // namespace osrf
