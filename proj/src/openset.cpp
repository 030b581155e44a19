#include "osrf/openset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "osrf/errors.hpp"

namespace osrf {

void ThresholdConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidConfig("threshold must lie in [0, 1]");
}

Decision decide(const std::vector<double>& sigmoid_activations, double threshold) {
  if (sigmoid_activations.empty()) throw EmptyActivations("decide: no activations");
  Decision d;
  d.activations = sigmoid_activations;
  std::size_t best = 0;
  for (std::size_t i = 1; i < sigmoid_activations.size(); ++i) {
    if (sigmoid_activations[i] > sigmoid_activations[best]) best = i;  // ties keep the lowest index
  }
  const double max_val = sigmoid_activations[best];
  if (max_val >= threshold) {
    d.known = true;
    d.class_index = best;
    d.confidence = max_val;
  }
  return d;
}

std::vector<double> default_sweep_grid() { return {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 1.0}; }

std::vector<SweepRow> sweep_threshold(const nn::Model& model, const std::vector<nn::Example>& known_eval,
                                      const std::vector<nn::Example>& unknown_eval,
                                      std::vector<double> thresholds) {
  if (known_eval.empty() || unknown_eval.empty()) throw EmptySet("sweep_threshold: empty evaluation set");
  if (thresholds.empty()) throw EmptySet("sweep_threshold: no thresholds");
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidConfig("sweep threshold outside [0, 1]");
  }
  std::sort(thresholds.begin(), thresholds.end());

  struct Scored {
    double max_sigmoid;
    bool argmax_correct;
  };
  auto score = [&model](const nn::Example& ex, bool check_label) {
    nn::Tensor x({ex.rows, ex.cols});
    std::copy(ex.values.begin(), ex.values.end(), x.data.begin());
    const nn::Activations a = model.predict(x);
    const Decision d = decide(a.sigmoids, 0.0);
    return Scored{d.confidence, check_label && d.class_index == ex.label};
  };

  std::vector<Scored> known;
  known.reserve(known_eval.size());
  for (const auto& ex : known_eval) known.push_back(score(ex, true));
  std::vector<double> unknown_max;
  unknown_max.reserve(unknown_eval.size());
  for (const auto& ex : unknown_eval) unknown_max.push_back(score(ex, false).max_sigmoid);

  std::vector<SweepRow> table;
  table.reserve(thresholds.size());
  for (double t : thresholds) {
    SweepRow row;
    row.threshold = t;
    std::size_t ok = 0;
    for (const Scored& s : known) {
      if (s.max_sigmoid >= t && s.argmax_correct) ++ok;
    }
    row.known_accuracy = static_cast<double>(ok) / static_cast<double>(known.size());
    std::size_t rejected = 0;
    for (double mx : unknown_max) {
      if (mx < t) ++rejected;
    }
    row.unknown_detection_rate = static_cast<double>(rejected) / static_cast<double>(unknown_max.size());
    table.push_back(row);
  }
  return table;
}

double tune_threshold(const std::vector<SweepRow>& table, TuneObjective objective, double known_accuracy_floor) {
  if (table.empty()) throw EmptyTable("tune_threshold: empty sweep table");
  const SweepRow* best = nullptr;
  double best_score = 0.0;
  for (const SweepRow& row : table) {
    double score;
    if (objective == TuneObjective::Balanced) {
      score = 0.5 * (row.known_accuracy + row.unknown_detection_rate);
    } else {
      if (row.known_accuracy < known_accuracy_floor) continue;
      score = row.unknown_detection_rate;
    }
    // Strict comparison plus a lower-threshold tiebreak.
    if (best == nullptr || score > best_score ||
        (score == best_score && row.threshold < best->threshold)) {
      best = &row;
      best_score = score;
    }
  }
  if (best == nullptr) throw InfeasibleConstraint("no sweep row satisfies the known-accuracy floor");
  return best->threshold;
}

void write_sweep_csv(const std::vector<SweepRow>& table, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "threshold,known_accuracy,unknown_detection_rate\n";
  char line[128];
  for (const SweepRow& row : table) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", row.threshold, row.known_accuracy,
                  row.unknown_detection_rate);
    out << line;
  }
  if (!out) throw IoError("short write to " + path);
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "threshold,known_accuracy,unknown_detection_rate")
    throw IoError("bad sweep CSV header in " + path);
  std::vector<SweepRow> table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SweepRow row;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &row.threshold, &row.known_accuracy,
                    &row.unknown_detection_rate) != 3)
      throw IoError("bad sweep CSV row in " + path);
    table.push_back(row);
  }
  return table;
}

}  // namespace osrf
