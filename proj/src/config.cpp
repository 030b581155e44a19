#include "osrf/config.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "osrf/errors.hpp"

namespace osrf {

namespace {

using nlohmann::json;

const std::vector<std::string> kTopKeys = {
    "preset",        "sample_rate_hz", "duration_s",     "known_classes", "unknown_classes",
    "base_signals_per_class", "slice", "split",          "impairments",   "architecture",
    "train",         "threshold",      "sweep_grid",     "snr_grid_db",   "confusion_snr_db",
    "sweep_snr_db",  "seed",           "out_dir",        "threads",       "deterministic",
    "keep_iq"};

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidConfig("unknown key \"" + key + "\" in " + where);
  }
}

void apply_preset(RunConfig& c, const std::string& preset) {
  if (preset == "desk-scale") return;  // the defaults
  if (preset == "paper-scale") {
    c.sample_rate_hz = 125e6;
    c.slice.slice_len = 131072;
    c.slice.fft_len = 65536;
    c.slice.n_segments = 2;
    c.base_signals_per_class = 1440;
    return;
  }
  throw InvalidConfig("unknown preset: " + preset);
}

}  // namespace

void RunConfig::validate() const {
  manifest().validate();  // covers classes, split, slice, impairments
  if (known_classes.empty()) throw InvalidConfig("need at least one known class");
  for (const std::string& name : known_classes) {
    if (!is_known_class(class_id_from_string(name)))
      throw InvalidConfig(name + " is not a trainable (known) class");
  }
  for (const std::string& name : unknown_classes) {
    if (is_known_class(class_id_from_string(name)))
      throw InvalidConfig(name + " is a known class; it cannot be in unknown_classes");
  }
  if (epochs < 1 || batch_size < 1) throw InvalidConfig("epochs and batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
  nn::loss_from_string(loss);
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidConfig("threshold must lie in [0, 1]");
  for (double t : sweep_grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidConfig("sweep_grid values must lie in [0, 1]");
  }
  if (sweep_grid.empty() || snr_grid_db.empty()) throw InvalidConfig("sweep_grid and snr_grid_db must be non-empty");
  if (out_dir.empty()) throw InvalidConfig("out_dir must be set");
}

std::string RunConfig::to_json_text() const {
  json j;
  j["preset"] = preset;
  j["sample_rate_hz"] = sample_rate_hz;
  j["duration_s"] = duration_s;
  j["known_classes"] = known_classes;
  j["unknown_classes"] = unknown_classes;
  j["base_signals_per_class"] = base_signals_per_class;
  j["slice"] = {{"slice_len", slice.slice_len},
                {"n_slices_per_signal", slice.n_slices_per_signal},
                {"fft_len", slice.fft_len},
                {"n_segments", slice.n_segments}};
  j["split"] = split;
  j["impairments"] = {{"snr_train_db", snr_train_db},
                      {"iq_gain_db", iq_gain_db},
                      {"freq_offset_hz", freq_offset_hz},
                      {"fading", fading},
                      {"max_doppler_hz", max_doppler_hz},
                      {"rician_k_db", rician_k_db},
                      {"path_delays_s", path_delays_s},
                      {"path_gains_db", path_gains_db}};
  j["architecture"] = architecture;
  j["train"] = {{"epochs", epochs},
                {"batch_size", batch_size},
                {"learning_rate", learning_rate},
                {"adam_beta1", adam_beta1},
                {"adam_beta2", adam_beta2},
                {"adam_eps", adam_eps},
                {"loss", loss}};
  j["threshold"] = threshold;
  j["sweep_grid"] = sweep_grid;
  j["snr_grid_db"] = snr_grid_db;
  j["confusion_snr_db"] = confusion_snr_db;
  j["sweep_snr_db"] = sweep_snr_db;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["threads"] = threads;
  j["deterministic"] = deterministic;
  j["keep_iq"] = keep_iq;
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, kTopKeys, "config");

  RunConfig c;
  try {
    if (j.contains("preset")) {
      c.preset = j.at("preset").get<std::string>();
      apply_preset(c, c.preset);
    }
    if (j.contains("sample_rate_hz")) c.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    if (j.contains("duration_s")) c.duration_s = j.at("duration_s").get<double>();
    if (j.contains("known_classes")) c.known_classes = j.at("known_classes").get<std::vector<std::string>>();
    if (j.contains("unknown_classes")) c.unknown_classes = j.at("unknown_classes").get<std::vector<std::string>>();
    if (j.contains("base_signals_per_class"))
      c.base_signals_per_class = j.at("base_signals_per_class").get<std::size_t>();
    if (j.contains("slice")) {
      const json& s = j.at("slice");
      reject_unknown(s, {"slice_len", "n_slices_per_signal", "fft_len", "n_segments"}, "slice");
      if (s.contains("slice_len")) c.slice.slice_len = s.at("slice_len").get<std::size_t>();
      if (s.contains("n_slices_per_signal"))
        c.slice.n_slices_per_signal = s.at("n_slices_per_signal").get<std::size_t>();
      if (s.contains("fft_len")) c.slice.fft_len = s.at("fft_len").get<std::size_t>();
      if (s.contains("n_segments")) c.slice.n_segments = s.at("n_segments").get<std::size_t>();
    }
    if (j.contains("split")) c.split = j.at("split").get<std::array<double, 3>>();
    if (j.contains("impairments")) {
      const json& i = j.at("impairments");
      reject_unknown(i,
                     {"snr_train_db", "iq_gain_db", "freq_offset_hz", "fading", "max_doppler_hz",
                      "rician_k_db", "path_delays_s", "path_gains_db"},
                     "impairments");
      if (i.contains("snr_train_db")) c.snr_train_db = i.at("snr_train_db").get<std::array<double, 2>>();
      if (i.contains("iq_gain_db")) c.iq_gain_db = i.at("iq_gain_db").get<std::array<double, 2>>();
      if (i.contains("freq_offset_hz")) c.freq_offset_hz = i.at("freq_offset_hz").get<std::array<double, 2>>();
      if (i.contains("fading")) c.fading = i.at("fading").get<std::string>();
      if (i.contains("max_doppler_hz")) c.max_doppler_hz = i.at("max_doppler_hz").get<double>();
      if (i.contains("rician_k_db")) c.rician_k_db = i.at("rician_k_db").get<double>();
      if (i.contains("path_delays_s")) c.path_delays_s = i.at("path_delays_s").get<std::vector<double>>();
      if (i.contains("path_gains_db")) c.path_gains_db = i.at("path_gains_db").get<std::vector<double>>();
    }
    if (j.contains("architecture")) c.architecture = j.at("architecture").get<std::string>();
    if (j.contains("train")) {
      const json& t = j.at("train");
      reject_unknown(t, {"epochs", "batch_size", "learning_rate", "adam_beta1", "adam_beta2", "adam_eps", "loss"},
                     "train");
      if (t.contains("epochs")) c.epochs = t.at("epochs").get<std::size_t>();
      if (t.contains("batch_size")) c.batch_size = t.at("batch_size").get<std::size_t>();
      if (t.contains("learning_rate")) c.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("adam_beta1")) c.adam_beta1 = t.at("adam_beta1").get<double>();
      if (t.contains("adam_beta2")) c.adam_beta2 = t.at("adam_beta2").get<double>();
      if (t.contains("adam_eps")) c.adam_eps = t.at("adam_eps").get<double>();
      if (t.contains("loss")) c.loss = t.at("loss").get<std::string>();
    }
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    if (j.contains("sweep_grid")) c.sweep_grid = j.at("sweep_grid").get<std::vector<double>>();
    if (j.contains("snr_grid_db")) c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("confusion_snr_db")) c.confusion_snr_db = j.at("confusion_snr_db").get<double>();
    if (j.contains("sweep_snr_db")) c.sweep_snr_db = j.at("sweep_snr_db").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    if (j.contains("deterministic")) c.deterministic = j.at("deterministic").get<bool>();
    if (j.contains("keep_iq")) c.keep_iq = j.at("keep_iq").get<bool>();
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad config field: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

DatasetManifest RunConfig::manifest() const {
  DatasetManifest m;
  m.sample_rate_hz = sample_rate_hz;
  m.duration_s = duration_s;
  for (const std::string& name : known_classes) m.classes.push_back({name, true, base_signals_per_class});
  for (const std::string& name : unknown_classes) m.classes.push_back({name, false, base_signals_per_class});
  m.slice = slice;
  m.split = split;
  m.seed = seed;
  m.snr_train_db = snr_train_db;
  m.iq_gain_db = iq_gain_db;
  m.freq_offset_hz = freq_offset_hz;
  m.fading = fading;
  m.max_doppler_hz = max_doppler_hz;
  m.rician_k_db = rician_k_db;
  m.path_delays_s = path_delays_s;
  m.path_gains_db = path_gains_db;
  m.keep_iq = keep_iq;
  return m;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig e;
  e.impairments = manifest().impairment_template();
  e.seed = derive_seed(seed, "eval");
  e.confusion_snr_db = confusion_snr_db;
  e.slice = slice;
  e.threads = effective_threads();
  return e;
}

nn::TrainConfig RunConfig::train_config() const {
  nn::TrainConfig t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.shuffle_seed = derive_seed(seed, "shuffle");
  t.adam.lr = learning_rate;
  t.adam.beta1 = adam_beta1;
  t.adam.beta2 = adam_beta2;
  t.adam.eps = adam_eps;
  t.loss = nn::loss_from_string(loss);
  return t;
}

}  // namespace osrf
