#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "osrf/config.hpp"
#include "osrf/crc32.hpp"
#include "osrf/errors.hpp"
#include "osrf/waveform.hpp"

namespace {

using namespace osrf;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

struct GlobalFlags {
  std::string config_path;
  bool seed_set = false;
  std::uint64_t seed = 0;
  bool threads_set = false;
  std::size_t threads = 0;
  bool deterministic = false;
  std::string out_dir;
};

RunConfig resolve_config(const GlobalFlags& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : RunConfig::from_file(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.threads_set) cfg.threads = g.threads;
  if (g.deterministic) cfg.deterministic = true;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  cfg.validate();
  return cfg;
}

// Reproducibility contract: every command leaves its fully resolved config
// next to its outputs.
void dump_config(const RunConfig& cfg, const std::string& command) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/" + command + ".config.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << cfg.to_json_text() << "\n";
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", v);
  return buf;
}

std::string provenance_tag(const std::string& model_path, const std::string& dataset_dir) {
  const std::uint32_t model_crc = nn::file_checksum(model_path);
  std::ifstream m(dataset_dir + "/manifest.json", std::ios::binary);
  if (!m) throw IoError("cannot open " + dataset_dir + "/manifest.json");
  const std::string text((std::istreambuf_iterator<char>(m)), std::istreambuf_iterator<char>());
  const std::uint32_t manifest_crc = crc32(text.data(), text.size());
  return "m" + hex32(model_crc) + ".d" + hex32(manifest_crc);
}

int cmd_generate(const GlobalFlags& g) {
  RunConfig cfg = resolve_config(g);
  dump_config(cfg, "generate");
  const std::string dataset_dir = cfg.out_dir + "/dataset";
  const BuildSummary summary = build_dataset(cfg.manifest(), dataset_dir, cfg.effective_threads());
  std::cout << "dataset: " << dataset_dir << "\n";
  for (const auto& [split, count] : summary.records_per_split) {
    std::cout << "  " << split << ": " << count << " records, crc32 " << hex32(summary.file_crc.at(split))
              << "\n";
  }
  return kExitOk;
}

int cmd_train(const GlobalFlags& g, const std::string& dataset_flag) {
  RunConfig cfg = resolve_config(g);
  dump_config(cfg, "train");
  const std::string dataset_dir = dataset_flag.empty() ? cfg.out_dir + "/dataset" : dataset_flag;

  const DatasetManifest manifest = load_manifest(dataset_dir);
  const std::vector<nn::Example> data = load_split_features(dataset_dir, Split::Train);
  if (data.empty()) throw EmptyDataset("training split is empty");

  nn::Model model = nn::Model::build(cfg.architecture, {manifest.slice.n_segments, manifest.slice.fft_len},
                                     manifest.known_class_names(), derive_seed(cfg.seed, "init"));
  const nn::TrainLog log = nn::train(model, data, cfg.train_config());

  const std::string model_path = cfg.out_dir + "/model.osrfmdl";
  nn::save_model(model, model_path);

  const std::string loss_path = cfg.out_dir + "/train_loss.csv";
  std::ofstream loss_csv(loss_path, std::ios::trunc);
  if (!loss_csv) throw IoError("cannot write " + loss_path);
  loss_csv << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < log.epoch_mean_loss.size(); ++e) {
    char line[64];
    std::snprintf(line, sizeof(line), "%zu,%.6f\n", e + 1, log.epoch_mean_loss[e]);
    loss_csv << line;
  }

  std::cout << "model: " << model_path << " crc32 " << hex32(nn::file_checksum(model_path)) << "\n";
  std::cout << "loss log: " << loss_path << " (" << log.epoch_mean_loss.size() << " epochs)\n";
  return kExitOk;
}

int cmd_eval(const GlobalFlags& g, const std::string& dataset_flag, const std::string& model_flag,
             const std::string& split_name, bool open_mode, double threshold_flag) {
  RunConfig cfg = resolve_config(g);
  dump_config(cfg, open_mode ? "eval-open" : "eval-closed");
  const std::string dataset_dir = dataset_flag.empty() ? cfg.out_dir + "/dataset" : dataset_flag;
  const std::string model_path = model_flag.empty() ? cfg.out_dir + "/model.osrfmdl" : model_flag;
  const Split split = split_name == "val" ? Split::Val : Split::Test;

  const nn::Model model = nn::load_model(model_path);
  const std::vector<EvalExample> all = load_split_raw(dataset_dir, split);
  std::vector<EvalExample> known, unknown;
  for (const EvalExample& ex : all) (ex.known_index >= 0 ? known : unknown).push_back(ex);

  const EvalConfig eval_cfg = cfg.eval_config();
  const double threshold = threshold_flag >= 0.0 ? threshold_flag : cfg.threshold;
  const EvalReport report = open_mode
                                ? open_set_eval(model, known, unknown, threshold, cfg.snr_grid_db, eval_cfg)
                                : closed_set_eval(model, known, cfg.snr_grid_db, eval_cfg);

  const std::string tag = provenance_tag(model_path, dataset_dir);
  const std::vector<std::string> paths =
      export_report(report, cfg.out_dir, open_mode ? "open" : "closed", tag);
  for (const std::string& p : paths) std::cout << p << "\n";
  for (std::size_t si = 0; si < report.snr_grid_db.size(); ++si) {
    std::printf("snr %+6.1f dB  overall %.4f\n", report.snr_grid_db[si], report.overall_accuracy[si]);
  }
  return kExitOk;
}

int cmd_sweep(const GlobalFlags& g, const std::string& dataset_flag, const std::string& model_flag,
              const std::string& split_name) {
  RunConfig cfg = resolve_config(g);
  dump_config(cfg, "sweep-threshold");
  const std::string dataset_dir = dataset_flag.empty() ? cfg.out_dir + "/dataset" : dataset_flag;
  const std::string model_path = model_flag.empty() ? cfg.out_dir + "/model.osrfmdl" : model_flag;
  const Split split = split_name == "test" ? Split::Test : Split::Val;

  const nn::Model model = nn::load_model(model_path);
  const std::vector<EvalExample> all = load_split_raw(dataset_dir, split);
  std::vector<EvalExample> known, unknown;
  for (const EvalExample& ex : all) (ex.known_index >= 0 ? known : unknown).push_back(ex);
  if (known.empty() || unknown.empty()) throw EmptySet("sweep needs both known and unknown examples");

  const EvalConfig eval_cfg = cfg.eval_config();
  const std::vector<nn::Example> known_f = impair_at_snr(known, cfg.sweep_snr_db, eval_cfg);
  const std::vector<nn::Example> unknown_f = impair_at_snr(unknown, cfg.sweep_snr_db, eval_cfg);
  const std::vector<SweepRow> table = sweep_threshold(model, known_f, unknown_f, cfg.sweep_grid);

  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].known_accuracy > table[i - 1].known_accuracy + 1e-12 ||
        table[i].unknown_detection_rate + 1e-12 < table[i - 1].unknown_detection_rate)
      throw NumericalError("sweep monotonicity violated");
  }

  const std::string tag = provenance_tag(model_path, dataset_dir);
  const std::string path = cfg.out_dir + "/sweep." + tag + ".csv";
  write_sweep_csv(table, path);
  std::cout << path << "\n";
  std::printf("balanced-objective threshold: %.6f\n", tune_threshold(table, TuneObjective::Balanced));
  return kExitOk;
}

int cmd_classify(const GlobalFlags& g, const std::string& model_flag, const std::string& input_path,
                 double rate_hz, double threshold_flag) {
  RunConfig cfg = resolve_config(g);
  const std::string model_path = model_flag.empty() ? cfg.out_dir + "/model.osrfmdl" : model_flag;
  const nn::Model model = nn::load_model(model_path);

  const std::size_t n_segments = model.input_shape()[0];
  const std::size_t fft_len = model.input_shape()[1];
  const std::size_t slice_len = n_segments * fft_len;

  std::ifstream in(input_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + input_path);
  std::vector<float> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.clear();
  in.seekg(0, std::ios::end);
  const auto n_bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  raw.resize(n_bytes / sizeof(float));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));

  if (raw.size() < 2 * slice_len)
    throw InvalidConfig("input holds " + std::to_string(raw.size() / 2) + " samples; the model needs " +
                        std::to_string(slice_len));

  IqSignal slice;
  slice.sample_rate_hz = rate_hz;
  slice.samples.reserve(slice_len);
  for (std::size_t i = 0; i < slice_len; ++i) slice.samples.emplace_back(raw[2 * i], raw[2 * i + 1]);

  SliceConfig sc;
  sc.slice_len = slice_len;
  sc.fft_len = fft_len;
  sc.n_segments = n_segments;
  sc.n_slices_per_signal = 1;
  const FeatureTensor f = preprocess(slice, sc);
  const nn::Activations a = model.predict(f);
  const double threshold = threshold_flag >= 0.0 ? threshold_flag : cfg.threshold;
  ThresholdConfig tc{threshold};
  tc.validate();
  const Decision d = decide(a.sigmoids, threshold);

  nlohmann::json out;
  out["verdict"] = d.known ? "known" : "unknown";
  if (d.known) {
    out["class"] = model.class_names()[d.class_index];
    out["class_index"] = d.class_index;
    out["confidence"] = d.confidence;
  }
  out["threshold"] = threshold;
  out["sample_rate_hz"] = rate_hz;
  nlohmann::json acts = nlohmann::json::object();
  for (std::size_t i = 0; i < a.sigmoids.size(); ++i) acts[model.class_names()[i]] = a.sigmoids[i];
  out["activations"] = acts;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-set RF standard classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", g.seed, "Override the run seed");
  auto* threads_opt = app.add_option("--threads", g.threads, "Worker thread cap (0 = hardware)");
  app.add_flag("--deterministic", g.deterministic, "Force single-threaded execution");
  app.add_option("--out-dir", g.out_dir, "Output directory");

  auto* c_gen = app.add_subcommand("generate", "Build the signal dataset");

  std::string dataset_flag, model_flag, input_path;
  std::string split_name = "test";
  double threshold_flag = -1.0;
  double rate_hz = 3.84e6;

  auto* c_train = app.add_subcommand("train", "Train the classifier on a dataset");
  c_train->add_option("--dataset", dataset_flag, "Dataset directory");

  auto* c_closed = app.add_subcommand("eval-closed", "Closed-set accuracy over the SNR grid");
  c_closed->add_option("--dataset", dataset_flag, "Dataset directory");
  c_closed->add_option("--model", model_flag, "Model file");
  c_closed->add_option("--split", split_name, "Evaluation split (val|test)");

  auto* c_open = app.add_subcommand("eval-open", "Open-set evaluation with rejection");
  c_open->add_option("--dataset", dataset_flag, "Dataset directory");
  c_open->add_option("--model", model_flag, "Model file");
  c_open->add_option("--split", split_name, "Evaluation split (val|test)");
  c_open->add_option("--threshold", threshold_flag, "Sigmoid threshold (default: config)");

  auto* c_sweep = app.add_subcommand("sweep-threshold", "Accuracy/rejection sweep over thresholds");
  c_sweep->add_option("--dataset", dataset_flag, "Dataset directory");
  c_sweep->add_option("--model", model_flag, "Model file");
  std::string sweep_split = "val";
  c_sweep->add_option("--split", sweep_split, "Sweep split (val|test)");

  auto* c_classify = app.add_subcommand("classify", "Classify one raw I/Q capture");
  c_classify->add_option("--model", model_flag, "Model file");
  c_classify->add_option("--input", input_path, "Raw file: interleaved little-endian float32 I,Q pairs")
      ->required();
  c_classify->add_option("--rate-hz", rate_hz, "Sample rate of the capture");
  c_classify->add_option("--threshold", threshold_flag, "Sigmoid threshold (default: config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  g.seed_set = seed_opt->count() > 0;
  g.threads_set = threads_opt->count() > 0;

  try {
    if (c_gen->parsed()) return cmd_generate(g);
    if (c_train->parsed()) return cmd_train(g, dataset_flag);
    if (c_closed->parsed()) return cmd_eval(g, dataset_flag, model_flag, split_name, false, -1.0);
    if (c_open->parsed()) return cmd_eval(g, dataset_flag, model_flag, split_name, true, threshold_flag);
    if (c_sweep->parsed()) return cmd_sweep(g, dataset_flag, model_flag, sweep_split);
    if (c_classify->parsed()) return cmd_classify(g, model_flag, input_path, rate_hz, threshold_flag);
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidManifest& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidSpec& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EmptySet& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EmptyDataset& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ChecksumMismatch& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const VersionMismatch& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}
