#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osrf/dataset.hpp"
#include "osrf/openset.hpp"

namespace osrf {

struct EvalConfig {
  ImpairmentConfig impairments;  // snr_db is overridden per grid point
  std::uint64_t seed = 0;
  double confusion_snr_db = 10.0;
  SliceConfig slice;
  std::size_t threads = 0;
};

struct EvalReport {
  std::string mode;  // "closed" or "open"
  double threshold = 0.0;
  std::vector<double> snr_grid_db;
  std::vector<std::string> row_classes;    // evaluated classes, in first-seen order
  std::vector<std::string> known_classes;  // model output classes (confusion columns)
  // accuracy[row_class][snr]; for unknown rows this is the rejection rate
  std::vector<std::vector<double>> per_class_accuracy;
  std::vector<double> overall_accuracy;  // per snr, over all evaluated examples
  // Confusion at confusion_snr_db: rows = row_classes, columns = known
  // classes + trailing "unknown" column.
  std::vector<std::vector<std::size_t>> confusion;
  double confusion_snr_db = 0.0;
  std::vector<std::size_t> row_counts;  // evaluated examples per row class
};

// Per grid SNR, re-impairs the held-out clean slices with seeded draws and
// classifies by argmax only. The impairment draws depend only on (example,
// snr), not on the evaluation mode, so the threshold-0 open-set run
// reproduces these results example-by-example.
EvalReport closed_set_eval(const nn::Model& model, const std::vector<EvalExample>& known_test,
                           const std::vector<double>& snr_grid_db, const EvalConfig& cfg);

// Applies decide() at the given threshold. A known-class example counts as
// correct only for Known(true class); an unknown-class example counts as
// correct only when flagged Unknown.
EvalReport open_set_eval(const nn::Model& model, const std::vector<EvalExample>& known_test,
                         const std::vector<EvalExample>& unknown_test, double threshold,
                         const std::vector<double>& snr_grid_db, const EvalConfig& cfg);

// Impair + preprocess an evaluation set at one SNR (the sweep front end).
std::vector<nn::Example> impair_at_snr(const std::vector<EvalExample>& examples, double snr_db,
                                       const EvalConfig& cfg);

// Writes <stem>_curves.csv (snr_db,class,accuracy), <stem>_confusion.csv,
// and <stem>_report.json into dir; file names embed the provenance tag
// (model checksum + dataset hash). Returns the written paths.
std::vector<std::string> export_report(const EvalReport& report, const std::string& dir,
                                       const std::string& stem, const std::string& provenance_tag);

// Re-parses an exported curves CSV (round-trip checks, plotting scripts).
struct CurvePoint {
  double snr_db;
  std::string class_name;
  double accuracy;
};
std::vector<CurvePoint> read_curves_csv(const std::string& path);

}  // namespace osrf
