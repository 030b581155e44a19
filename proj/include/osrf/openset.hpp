#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osrf/nn.hpp"

namespace osrf {

// Open-set verdict for one signal. When `known` is true, class_index is the
// argmax over the sigmoid activations (ties to the lowest index) and
// confidence is that maximum. Activations are retained for audit.
struct Decision {
  bool known = false;
  std::size_t class_index = 0;
  double confidence = 0.0;
  std::vector<double> activations;
};

struct ThresholdConfig {
  double threshold = 0.9999;
  void validate() const;  // throws InvalidConfig when outside [0, 1]
};

// Known iff the maximum sigmoid activation is >= threshold. Sigmoid outputs
// are clamped to (0, 1), so threshold 0 always yields Known and threshold 1
// always yields Unknown.
Decision decide(const std::vector<double>& sigmoid_activations, double threshold);

struct SweepRow {
  double threshold = 0.0;
  double known_accuracy = 0.0;
  double unknown_detection_rate = 0.0;
};

// Evaluates both sets once (activations are computed per example and reused
// across thresholds) and tabulates, per threshold:
//   known_accuracy        fraction of known examples decided Known(correct)
//   unknown_detection_rate fraction of unknown examples decided Unknown
std::vector<SweepRow> sweep_threshold(const nn::Model& model, const std::vector<nn::Example>& known_eval,
                                      const std::vector<nn::Example>& unknown_eval,
                                      std::vector<double> thresholds);

// {0, 0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 1}
std::vector<double> default_sweep_grid();

enum class TuneObjective { Balanced, Constrained };

// Balanced: maximize the mean of the two rates. Constrained: maximize the
// unknown detection rate subject to known_accuracy >= floor (throws
// InfeasibleConstraint when no row qualifies). Ties go to the lower
// threshold.
double tune_threshold(const std::vector<SweepRow>& table, TuneObjective objective,
                      double known_accuracy_floor = 0.0);

// CSV: header threshold,known_accuracy,unknown_detection_rate; 6 decimals.
void write_sweep_csv(const std::vector<SweepRow>& table, const std::string& path);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

}  // namespace osrf
