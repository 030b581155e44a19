#include "osrf/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "osrf/errors.hpp"
#include "osrf/parallel.hpp"
#include "osrf/rng.hpp"

namespace osrf {

namespace {

std::string snr_token(double snr_db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", snr_db);
  return buf;
}

// Per-(example, snr) impairment seed; identical across evaluation modes.
std::uint64_t example_seed(const EvalConfig& cfg, const EvalExample& ex, std::size_t index, double snr_db) {
  return derive_seed(cfg.seed, "eval:" + ex.class_name + ":" + std::to_string(index) + ":" + snr_token(snr_db));
}

struct Scored {
  std::size_t argmax = 0;
  double max_sigmoid = 0.0;
};

Scored score_example(const nn::Model& model, const EvalExample& ex, double snr_db, std::size_t index,
                     const EvalConfig& cfg) {
  ImpairmentConfig imp = cfg.impairments;
  imp.snr_db = snr_db;
  imp.seed = example_seed(cfg, ex, index, snr_db);
  const IqSignal impaired = augment(ex.clean_slice, imp);
  const FeatureTensor f = preprocess(impaired, cfg.slice);
  const nn::Activations a = model.predict(f);
  const Decision d = decide(a.sigmoids, 0.0);
  return {d.class_index, d.confidence};
}

struct RowIndex {
  std::vector<std::string> names;
  std::vector<std::size_t> of_example;  // row per evaluated example

  void build(const std::vector<const std::vector<EvalExample>*>& sets) {
    for (const auto* set : sets) {
      for (const EvalExample& ex : *set) {
        auto it = std::find(names.begin(), names.end(), ex.class_name);
        if (it == names.end()) {
          names.push_back(ex.class_name);
          of_example.push_back(names.size() - 1);
        } else {
          of_example.push_back(static_cast<std::size_t>(it - names.begin()));
        }
      }
    }
  }
};

EvalReport run_eval(const nn::Model& model, const std::vector<EvalExample>& known_test,
                    const std::vector<EvalExample>& unknown_test, bool open_mode, double threshold,
                    const std::vector<double>& snr_grid_db, const EvalConfig& cfg) {
  if (known_test.empty()) throw EmptySet("evaluation needs a non-empty known set");
  if (open_mode && unknown_test.empty()) throw EmptySet("open-set evaluation needs unknown examples");
  if (snr_grid_db.empty()) throw EmptySet("empty SNR grid");
  for (const EvalExample& ex : known_test) {
    if (ex.known_index < 0) throw InvalidLabel("known set contains an unknown-class example");
  }

  std::vector<const EvalExample*> examples;
  for (const EvalExample& ex : known_test) examples.push_back(&ex);
  if (open_mode) {
    for (const EvalExample& ex : unknown_test) examples.push_back(&ex);
  }

  RowIndex rows;
  if (open_mode) {
    rows.build({&known_test, &unknown_test});
  } else {
    rows.build({&known_test});
  }

  EvalReport report;
  report.mode = open_mode ? "open" : "closed";
  report.threshold = open_mode ? threshold : 0.0;
  report.snr_grid_db = snr_grid_db;
  report.row_classes = rows.names;
  report.known_classes = model.class_names();
  report.confusion_snr_db = cfg.confusion_snr_db;
  report.row_counts.assign(rows.names.size(), 0);
  for (std::size_t e = 0; e < examples.size(); ++e) report.row_counts[rows.of_example[e]] += 1;

  report.per_class_accuracy.assign(rows.names.size(), std::vector<double>(snr_grid_db.size(), 0.0));
  report.overall_accuracy.assign(snr_grid_db.size(), 0.0);

  // Scores per example per snr; evaluation of each example is independent.
  for (std::size_t si = 0; si < snr_grid_db.size(); ++si) {
    const double snr = snr_grid_db[si];
    std::vector<Scored> scored(examples.size());
    parallel_for(examples.size(), cfg.threads,
                 [&](std::size_t e) { scored[e] = score_example(model, *examples[e], snr, e, cfg); });
    std::vector<std::size_t> correct_per_row(rows.names.size(), 0);
    std::size_t correct_total = 0;
    for (std::size_t e = 0; e < examples.size(); ++e) {
      const EvalExample& ex = *examples[e];
      bool correct;
      if (!open_mode) {
        correct = scored[e].argmax == static_cast<std::size_t>(ex.known_index);
      } else {
        const bool verdict_known = scored[e].max_sigmoid >= threshold;
        if (ex.known_index >= 0) {
          correct = verdict_known && scored[e].argmax == static_cast<std::size_t>(ex.known_index);
        } else {
          correct = !verdict_known;
        }
      }
      if (correct) {
        correct_per_row[rows.of_example[e]] += 1;
        correct_total += 1;
      }
    }
    for (std::size_t r = 0; r < rows.names.size(); ++r) {
      report.per_class_accuracy[r][si] =
          static_cast<double>(correct_per_row[r]) / static_cast<double>(report.row_counts[r]);
    }
    report.overall_accuracy[si] = static_cast<double>(correct_total) / static_cast<double>(examples.size());
  }

  // Confusion matrix at the designated SNR.
  const std::size_t n_known = report.known_classes.size();
  report.confusion.assign(rows.names.size(), std::vector<std::size_t>(n_known + 1, 0));
  {
    std::vector<Scored> scored(examples.size());
    parallel_for(examples.size(), cfg.threads, [&](std::size_t e) {
      scored[e] = score_example(model, *examples[e], cfg.confusion_snr_db, e, cfg);
    });
    for (std::size_t e = 0; e < examples.size(); ++e) {
      const bool verdict_known = !open_mode || scored[e].max_sigmoid >= threshold;
      const std::size_t col = verdict_known ? scored[e].argmax : n_known;
      report.confusion[rows.of_example[e]][col] += 1;
    }
  }
  return report;
}

}  // namespace

EvalReport closed_set_eval(const nn::Model& model, const std::vector<EvalExample>& known_test,
                           const std::vector<double>& snr_grid_db, const EvalConfig& cfg) {
  return run_eval(model, known_test, {}, false, 0.0, snr_grid_db, cfg);
}

EvalReport open_set_eval(const nn::Model& model, const std::vector<EvalExample>& known_test,
                         const std::vector<EvalExample>& unknown_test, double threshold,
                         const std::vector<double>& snr_grid_db, const EvalConfig& cfg) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidConfig("threshold must lie in [0, 1]");
  return run_eval(model, known_test, unknown_test, true, threshold, snr_grid_db, cfg);
}

std::vector<nn::Example> impair_at_snr(const std::vector<EvalExample>& examples, double snr_db,
                                       const EvalConfig& cfg) {
  std::vector<nn::Example> out(examples.size());
  parallel_for(examples.size(), cfg.threads, [&](std::size_t e) {
    ImpairmentConfig imp = cfg.impairments;
    imp.snr_db = snr_db;
    imp.seed = example_seed(cfg, examples[e], e, snr_db);
    const IqSignal impaired = augment(examples[e].clean_slice, imp);
    const FeatureTensor f = preprocess(impaired, cfg.slice);
    nn::Example ex;
    ex.values.assign(f.values.begin(), f.values.end());
    ex.rows = f.rows;
    ex.cols = f.cols;
    ex.label = examples[e].known_index >= 0 ? static_cast<std::uint32_t>(examples[e].known_index) : 0;
    out[e] = std::move(ex);
  });
  return out;
}

std::vector<std::string> export_report(const EvalReport& report, const std::string& dir,
                                       const std::string& stem, const std::string& provenance_tag) {
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + stem + (provenance_tag.empty() ? "" : "." + provenance_tag);
  std::vector<std::string> paths;
  char line[256];

  {
    const std::string path = base + "_curves.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "snr_db,class,accuracy\n";
    for (std::size_t r = 0; r < report.row_classes.size(); ++r) {
      for (std::size_t si = 0; si < report.snr_grid_db.size(); ++si) {
        std::snprintf(line, sizeof(line), "%.6f,%s,%.6f\n", report.snr_grid_db[si],
                      report.row_classes[r].c_str(), report.per_class_accuracy[r][si]);
        out << line;
      }
    }
    for (std::size_t si = 0; si < report.snr_grid_db.size(); ++si) {
      std::snprintf(line, sizeof(line), "%.6f,overall,%.6f\n", report.snr_grid_db[si],
                    report.overall_accuracy[si]);
      out << line;
    }
    if (!out) throw IoError("short write to " + path);
    paths.push_back(path);
  }

  {
    const std::string path = base + "_confusion.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "class";
    for (const std::string& name : report.known_classes) out << "," << name;
    out << ",unknown\n";
    for (std::size_t r = 0; r < report.row_classes.size(); ++r) {
      out << report.row_classes[r];
      for (std::size_t c = 0; c < report.confusion[r].size(); ++c) out << "," << report.confusion[r][c];
      out << "\n";
    }
    if (!out) throw IoError("short write to " + path);
    paths.push_back(path);
  }

  {
    const std::string path = base + "_report.json";
    nlohmann::json j;
    j["mode"] = report.mode;
    j["threshold"] = report.threshold;
    j["snr_grid_db"] = report.snr_grid_db;
    j["row_classes"] = report.row_classes;
    j["known_classes"] = report.known_classes;
    j["per_class_accuracy"] = report.per_class_accuracy;
    j["overall_accuracy"] = report.overall_accuracy;
    j["confusion"] = report.confusion;
    j["confusion_snr_db"] = report.confusion_snr_db;
    j["row_counts"] = report.row_counts;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path);
    paths.push_back(path);
  }
  return paths;
}

std::vector<CurvePoint> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "snr_db,class,accuracy") throw IoError("bad curves CSV header");
  std::vector<CurvePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.rfind(',');
    if (c1 == std::string::npos || c2 == c1) throw IoError("bad curves CSV row");
    CurvePoint p;
    p.snr_db = std::stod(line.substr(0, c1));
    p.class_name = line.substr(c1 + 1, c2 - c1 - 1);
    p.accuracy = std::stod(line.substr(c2 + 1));
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace osrf
