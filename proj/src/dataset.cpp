#include "osrf/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "osrf/binio.hpp"
#include "osrf/crc32.hpp"
#include "osrf/errors.hpp"
#include "osrf/parallel.hpp"
#include "osrf/rng.hpp"
#include "osrf/waveform.hpp"

namespace osrf {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'O', 'S', 'R', 'F', 'D', 'A', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidManifest("unknown key \"" + key + "\" in " + where);
  }
}

struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
};

// Base-signal split with cumulative rounding, so per-split counts stay
// within one signal of the exact fractions. Unknown classes never reach the
// training split: their train share is folded into val/test proportionally.
SplitCounts class_split(const DatasetManifest& m, const ClassPlan& plan) {
  SplitCounts c;
  const auto n = static_cast<double>(plan.base_signals);
  if (plan.known) {
    c.train = static_cast<std::size_t>(std::llround(m.split[0] * n));
    const auto upto_val = static_cast<std::size_t>(std::llround((m.split[0] + m.split[1]) * n));
    c.val = upto_val - c.train;
    c.test = plan.base_signals - c.train - c.val;
  } else {
    const double denom = m.split[1] + m.split[2];
    c.val = static_cast<std::size_t>(std::llround(n * m.split[1] / denom));
    c.test = plan.base_signals - c.val;
  }
  return c;
}

Split split_of_index(const SplitCounts& c, std::size_t base_index) {
  if (base_index < c.train) return Split::Train;
  if (base_index < c.train + c.val) return Split::Val;
  return Split::Test;
}

std::vector<std::uint8_t> serialize_record(const Record& r) {
  std::vector<std::uint8_t> body;
  body.reserve(64 + 4 * (r.features.size() + r.iq.size()));
  put_u32(body, r.class_id);
  put_u64(body, r.base_seed);
  put_u32(body, r.base_index);
  put_u32(body, r.slice_index);
  put_u32(body, r.rows);
  put_u32(body, r.cols);
  put_f64(body, r.sample_rate_hz);
  put_f64(body, r.snr_db);
  put_f64(body, r.iq_gain_db);
  put_f64(body, r.freq_offset_hz);
  put_u32(body, r.fading_kind);
  put_f64(body, r.k_factor_db);
  put_u32(body, static_cast<std::uint32_t>(r.iq.size()));
  for (float v : r.features) put_f32(body, v);
  for (float v : r.iq) put_f32(body, v);
  return body;
}

Record deserialize_record(const std::vector<std::uint8_t>& body) {
  ByteReader r(body.data(), body.size());
  Record rec;
  rec.class_id = r.u32();
  rec.base_seed = r.u64();
  rec.base_index = r.u32();
  rec.slice_index = r.u32();
  rec.rows = r.u32();
  rec.cols = r.u32();
  rec.sample_rate_hz = r.f64();
  rec.snr_db = r.f64();
  rec.iq_gain_db = r.f64();
  rec.freq_offset_hz = r.f64();
  rec.fading_kind = r.u32();
  rec.k_factor_db = r.f64();
  const std::uint32_t iq_len = r.u32();
  rec.features.resize(static_cast<std::size_t>(rec.rows) * rec.cols);
  r.raw(rec.features.data(), rec.features.size() * sizeof(float));
  rec.iq.resize(iq_len);
  r.raw(rec.iq.data(), rec.iq.size() * sizeof(float));
  if (r.remaining() != 0) throw IoError("record body has trailing bytes");
  return rec;
}

class SplitWriter {
 public:
  SplitWriter(const std::string& path, const std::string& head_text) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot write " + path);
    path_ = path;
    std::vector<std::uint8_t> head;
    put_bytes(head, kMagic, sizeof(kMagic));
    put_u32(head, kVersion);
    put_u32(head, static_cast<std::uint32_t>(head_text.size()));
    put_bytes(head, head_text.data(), head_text.size());
    write(head);
  }

  void add(const Record& r) {
    const std::vector<std::uint8_t> body = serialize_record(r);
    std::vector<std::uint8_t> framed;
    framed.reserve(body.size() + 8);
    put_u32(framed, static_cast<std::uint32_t>(body.size()));
    put_bytes(framed, body.data(), body.size());
    put_u32(framed, crc32(body.data(), body.size()));
    write(framed);
  }

  std::uint32_t close() {
    std::vector<std::uint8_t> tail;
    put_u32(tail, crc_.value());
    const std::uint32_t file_crc = crc_.value();
    write(tail);
    out_.flush();
    if (!out_) throw IoError("short write to " + path_);
    out_.close();
    return file_crc;
  }

 private:
  void write(const std::vector<std::uint8_t>& bytes) {
    crc_.update(bytes.data(), bytes.size());
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw IoError("short write to " + path_);
  }

  std::ofstream out_;
  std::string path_;
  Crc32 crc_;
};

FadingKind fading_from_name(const std::string& name) {
  if (name == "none") return FadingKind::None;
  if (name == "rayleigh") return FadingKind::Rayleigh;
  if (name == "rician") return FadingKind::Rician;
  if (name == "mix") return FadingKind::Rayleigh;  // base kind; mix flag set separately
  throw InvalidManifest("unknown fading mode: " + name);
}

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

void DatasetManifest::validate() const {
  if (schema_version != 1) throw InvalidManifest("unsupported schema_version");
  if (!(sample_rate_hz > 0.0)) throw InvalidManifest("sample_rate_hz must be positive");
  if (!(duration_s > 0.0)) throw InvalidManifest("duration_s must be positive");
  if (classes.empty()) throw InvalidManifest("no classes configured");
  bool any_unknown = false;
  for (const ClassPlan& plan : classes) {
    ClassId id;
    try {
      id = class_id_from_string(plan.name);
    } catch (const std::invalid_argument& e) {
      throw InvalidManifest(e.what());
    }
    if (plan.known != is_known_class(id))
      throw InvalidManifest("class " + plan.name + " has the wrong known/unknown flag");
    if (plan.base_signals == 0) throw InvalidManifest("class " + plan.name + " has zero base signals");
    any_unknown = any_unknown || !plan.known;
  }
  for (double f : split) {
    if (f < 0.0 || f > 1.0) throw InvalidManifest("split fractions must lie in [0, 1]");
  }
  if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9)
    throw InvalidManifest("split fractions must sum to 1");
  if (any_unknown && split[1] + split[2] <= 0.0)
    throw InvalidManifest("unknown classes need non-zero val+test fractions");
  try {
    slice.validate();
  } catch (const InvalidConfig& e) {
    throw InvalidManifest(e.what());
  }
  if (static_cast<double>(slice.slice_len) > duration_s * sample_rate_hz)
    throw InvalidManifest("slice_len exceeds the base signal length");
  if (snr_train_db[0] > snr_train_db[1] || iq_gain_db[0] > iq_gain_db[1] ||
      freq_offset_hz[0] > freq_offset_hz[1])
    throw InvalidManifest("impairment ranges must be non-empty");
  fading_from_name(fading);
  if (max_doppler_hz < 0.0) throw InvalidManifest("max_doppler_hz must be non-negative");
  if (path_delays_s.size() != path_gains_db.size() || path_delays_s.empty())
    throw InvalidManifest("path delays/gains must be non-empty and the same length");
}

std::vector<std::string> DatasetManifest::known_class_names() const {
  std::vector<std::string> names;
  for (const ClassPlan& plan : classes) {
    if (plan.known) names.push_back(plan.name);
  }
  return names;
}

ImpairmentConfig DatasetManifest::impairment_template() const {
  ImpairmentConfig cfg;
  cfg.iq_gain_db_range = iq_gain_db;
  cfg.freq_offset_hz_range = freq_offset_hz;
  cfg.profile.fading = fading_from_name(fading);
  cfg.profile.k_factor_db = rician_k_db;
  cfg.profile.path_delays_s = path_delays_s;
  cfg.profile.path_gains_db = path_gains_db;
  cfg.profile.max_doppler_hz = max_doppler_hz;
  cfg.mix_fading = fading == "mix";
  return cfg;
}

std::string DatasetManifest::to_json_text() const {
  json j;
  j["schema_version"] = schema_version;
  j["sample_rate_hz"] = sample_rate_hz;
  j["duration_s"] = duration_s;
  json classes_j = json::array();
  for (const ClassPlan& plan : classes)
    classes_j.push_back({{"name", plan.name}, {"known", plan.known}, {"base_signals", plan.base_signals}});
  j["classes"] = classes_j;
  j["slice"] = {{"slice_len", slice.slice_len},
                {"n_slices_per_signal", slice.n_slices_per_signal},
                {"fft_len", slice.fft_len},
                {"n_segments", slice.n_segments}};
  j["split"] = split;
  j["seed"] = seed;
  j["snr_train_db"] = snr_train_db;
  j["iq_gain_db"] = iq_gain_db;
  j["freq_offset_hz"] = freq_offset_hz;
  j["fading"] = fading;
  j["max_doppler_hz"] = max_doppler_hz;
  j["rician_k_db"] = rician_k_db;
  j["path_delays_s"] = path_delays_s;
  j["path_gains_db"] = path_gains_db;
  j["keep_iq"] = keep_iq;
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidManifest(std::string("manifest is not valid JSON: ") + e.what());
  }
  require_keys(j, {"schema_version", "sample_rate_hz", "duration_s", "classes", "slice", "split", "seed",
                   "snr_train_db", "iq_gain_db", "freq_offset_hz", "fading", "max_doppler_hz", "rician_k_db",
                   "path_delays_s", "path_gains_db", "keep_iq"},
               "manifest");
  DatasetManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    m.duration_s = j.at("duration_s").get<double>();
    for (const json& c : j.at("classes")) {
      require_keys(c, {"name", "known", "base_signals"}, "manifest class");
      m.classes.push_back(
          {c.at("name").get<std::string>(), c.at("known").get<bool>(), c.at("base_signals").get<std::size_t>()});
    }
    const json& s = j.at("slice");
    require_keys(s, {"slice_len", "n_slices_per_signal", "fft_len", "n_segments"}, "manifest slice");
    m.slice.slice_len = s.at("slice_len").get<std::size_t>();
    m.slice.n_slices_per_signal = s.at("n_slices_per_signal").get<std::size_t>();
    m.slice.fft_len = s.at("fft_len").get<std::size_t>();
    m.slice.n_segments = s.at("n_segments").get<std::size_t>();
    m.split = j.at("split").get<std::array<double, 3>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.snr_train_db = j.at("snr_train_db").get<std::array<double, 2>>();
    m.iq_gain_db = j.at("iq_gain_db").get<std::array<double, 2>>();
    m.freq_offset_hz = j.at("freq_offset_hz").get<std::array<double, 2>>();
    m.fading = j.at("fading").get<std::string>();
    m.max_doppler_hz = j.at("max_doppler_hz").get<double>();
    m.rician_k_db = j.at("rician_k_db").get<double>();
    m.path_delays_s = j.at("path_delays_s").get<std::vector<double>>();
    m.path_gains_db = j.at("path_gains_db").get<std::vector<double>>();
    m.keep_iq = j.at("keep_iq").get<bool>();
  } catch (const json::exception& e) {
    throw InvalidManifest(std::string("bad manifest field: ") + e.what());
  }
  return m;
}

std::string split_path(const std::string& dataset_dir, Split split) {
  return dataset_dir + "/" + to_string(split) + ".osrf";
}

BuildSummary build_dataset(const DatasetManifest& manifest, const std::string& out_dir, std::size_t threads) {
  manifest.validate();
  std::filesystem::create_directories(out_dir);

  // Per-split record counts are known up front, so each file head is final
  // before any record is written.
  std::map<Split, std::size_t> counts;
  for (const ClassPlan& plan : manifest.classes) {
    const SplitCounts c = class_split(manifest, plan);
    counts[Split::Train] += c.train * manifest.slice.n_slices_per_signal;
    counts[Split::Val] += c.val * manifest.slice.n_slices_per_signal;
    counts[Split::Test] += c.test * manifest.slice.n_slices_per_signal;
  }

  const std::string manifest_text = manifest.to_json_text();
  {
    std::ofstream sidecar(out_dir + "/manifest.json", std::ios::trunc);
    if (!sidecar) throw IoError("cannot write " + out_dir + "/manifest.json");
    sidecar << manifest_text << "\n";
  }

  std::map<Split, std::unique_ptr<SplitWriter>> writers;
  for (Split split : {Split::Train, Split::Val, Split::Test}) {
    json head;
    head["manifest"] = json::parse(manifest_text);
    head["split"] = to_string(split);
    head["record_count"] = counts[split];
    writers[split] = std::make_unique<SplitWriter>(split_path(out_dir, split), head.dump());
  }

  const ImpairmentConfig imp_template = manifest.impairment_template();

  for (const ClassPlan& plan : manifest.classes) {
    const ClassId class_id = class_id_from_string(plan.name);
    const SplitCounts split_counts = class_split(manifest, plan);
    const std::size_t n_base = plan.base_signals;

    // Slots indexed by base signal keep output order independent of the
    // thread count.
    std::vector<std::vector<Record>> slots(n_base);
    parallel_for(n_base, threads, [&](std::size_t i) {
      const std::string tag = plan.name + ":" + std::to_string(i);
      const std::uint64_t base_seed = derive_seed(manifest.seed, "base:" + tag);
      const Split split = split_of_index(split_counts, i);
      const bool store_iq = manifest.keep_iq || split != Split::Train;

      const IqSignal base = gen_class_signal(class_id, manifest.duration_s, base_seed, manifest.sample_rate_hz);
      std::vector<IqSignal> slices =
          bootstrap_slices(base, manifest.slice, derive_seed(manifest.seed, "slices:" + tag));
      // A slice can land entirely inside a burst gap; redraw those, they
      // carry no signal content to learn from or add noise to.
      for (std::size_t j = 0; j < slices.size(); ++j) {
        for (std::size_t attempt = 0; mean_power(slices[j].samples) <= 0.0; ++attempt) {
          if (attempt >= 100) throw ZeroPowerSignal("class " + plan.name + " produced only empty slices");
          SliceConfig one = manifest.slice;
          one.n_slices_per_signal = 1;
          slices[j] = bootstrap_slices(
              base, one, derive_seed(manifest.seed, "reslice:" + tag + ":" + std::to_string(j) + ":" +
                                                         std::to_string(attempt)))[0];
        }
      }

      std::vector<Record>& out = slots[i];
      out.reserve(slices.size());
      for (std::size_t j = 0; j < slices.size(); ++j) {
        const std::string slice_tag = tag + ":" + std::to_string(j);
        ImpairmentConfig imp = imp_template;
        imp.snr_db = Rng(derive_seed(manifest.seed, "snr:" + slice_tag))
                         .uniform(manifest.snr_train_db[0], manifest.snr_train_db[1]);
        imp.seed = derive_seed(manifest.seed, "augment:" + slice_tag);
        const IqSignal impaired = augment(slices[j], imp);
        const FeatureTensor f = preprocess(impaired, manifest.slice);

        Record rec;
        rec.class_id = static_cast<std::uint32_t>(class_id);
        rec.base_seed = base_seed;
        rec.base_index = static_cast<std::uint32_t>(i);
        rec.slice_index = static_cast<std::uint32_t>(j);
        rec.rows = static_cast<std::uint32_t>(f.rows);
        rec.cols = static_cast<std::uint32_t>(f.cols);
        rec.sample_rate_hz = manifest.sample_rate_hz;
        rec.snr_db = imp.snr_db;
        rec.iq_gain_db = meta_get_num(impaired.meta, "iq_gain_db");
        rec.freq_offset_hz = meta_get_num(impaired.meta, "freq_offset_hz");
        const std::string fading_name = impaired.meta.at("fading");
        rec.fading_kind = static_cast<std::uint32_t>(fading_name == "rayleigh" ? FadingKind::Rayleigh
                                                     : fading_name == "rician" ? FadingKind::Rician
                                                                               : FadingKind::None);
        rec.k_factor_db = rec.fading_kind == static_cast<std::uint32_t>(FadingKind::Rician)
                              ? meta_get_num(impaired.meta, "k_factor_db")
                              : 0.0;
        rec.features.assign(f.values.begin(), f.values.end());
        if (store_iq) {
          rec.iq.reserve(2 * slices[j].samples.size());
          for (const cd& s : slices[j].samples) {
            rec.iq.push_back(static_cast<float>(s.real()));
            rec.iq.push_back(static_cast<float>(s.imag()));
          }
        }
        out.push_back(std::move(rec));
      }
    });

    for (std::size_t i = 0; i < n_base; ++i) {
      SplitWriter& w = *writers[split_of_index(split_counts, i)];
      for (const Record& rec : slots[i]) w.add(rec);
    }
  }

  BuildSummary summary;
  for (Split split : {Split::Train, Split::Val, Split::Test}) {
    summary.records_per_split[to_string(split)] = counts[split];
    summary.file_crc[to_string(split)] = writers[split]->close();
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

struct DatasetReader::Impl {
  std::ifstream in;
  Crc32 crc;
  std::size_t remaining = 0;
  std::string path;

  std::vector<std::uint8_t> read_exact(std::size_t n) {
    std::vector<std::uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n)) throw IoError("unexpected end of " + path);
    return buf;
  }
};

DatasetReader::DatasetReader(const std::string& path) : impl_(new Impl) {
  impl_->path = path;
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) {
    delete impl_;
    impl_ = nullptr;
    throw IoError("cannot open " + path);
  }
  try {
    std::vector<std::uint8_t> head = impl_->read_exact(sizeof(kMagic) + 8);
    impl_->crc.update(head.data(), head.size());
    ByteReader r(head.data(), head.size());
    if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
      throw IoError("not a dataset container: " + path);
    const std::uint32_t version = r.u32();
    if (version > kVersion) throw VersionMismatch("dataset version is newer than this build");
    const std::uint32_t head_len = r.u32();

    std::vector<std::uint8_t> head_text = impl_->read_exact(head_len);
    impl_->crc.update(head_text.data(), head_text.size());
    json j;
    try {
      j = json::parse(std::string(reinterpret_cast<const char*>(head_text.data()), head_text.size()));
    } catch (const json::exception&) {
      throw IoError("unreadable dataset head: " + path);
    }
    manifest_ = DatasetManifest::from_json_text(j.at("manifest").dump());
    split_name_ = j.at("split").get<std::string>();
    record_count_ = j.at("record_count").get<std::size_t>();
    impl_->remaining = record_count_;
  } catch (...) {
    delete impl_;
    impl_ = nullptr;
    throw;
  }
}

DatasetReader::~DatasetReader() { delete impl_; }

DatasetReader::DatasetReader(DatasetReader&& other) noexcept
    : impl_(other.impl_), manifest_(std::move(other.manifest_)), split_name_(std::move(other.split_name_)),
      record_count_(other.record_count_) {
  other.impl_ = nullptr;
}

bool DatasetReader::next(Record& out) {
  if (impl_->remaining == 0) {
    // Validate the trailing file checksum exactly once.
    if (impl_->in.is_open()) {
      const std::uint32_t expected = impl_->crc.value();
      std::vector<std::uint8_t> tail = impl_->read_exact(4);
      ByteReader r(tail.data(), 4);
      if (r.u32() != expected) throw ChecksumMismatch("dataset file checksum mismatch: " + impl_->path);
      impl_->in.close();
    }
    return false;
  }
  std::vector<std::uint8_t> len_bytes = impl_->read_exact(4);
  impl_->crc.update(len_bytes.data(), 4);
  ByteReader lr(len_bytes.data(), 4);
  const std::uint32_t body_len = lr.u32();
  std::vector<std::uint8_t> body = impl_->read_exact(body_len);
  impl_->crc.update(body.data(), body.size());
  std::vector<std::uint8_t> crc_bytes = impl_->read_exact(4);
  impl_->crc.update(crc_bytes.data(), 4);
  ByteReader cr(crc_bytes.data(), 4);
  if (cr.u32() != crc32(body.data(), body.size()))
    throw ChecksumMismatch("record checksum mismatch in " + impl_->path);
  out = deserialize_record(body);
  impl_->remaining -= 1;
  return true;
}

DatasetManifest load_manifest(const std::string& dataset_dir) {
  std::ifstream in(dataset_dir + "/manifest.json");
  if (!in) throw IoError("cannot open " + dataset_dir + "/manifest.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DatasetManifest::from_json_text(text);
}

std::vector<nn::Example> load_split_features(const std::string& dataset_dir, Split split) {
  DatasetReader reader(split_path(dataset_dir, split));
  const std::vector<std::string> known = reader.manifest().known_class_names();
  std::vector<nn::Example> out;
  Record rec;
  while (reader.next(rec)) {
    const std::string name = to_string(static_cast<ClassId>(rec.class_id));
    const auto it = std::find(known.begin(), known.end(), name);
    if (it == known.end()) continue;  // unknown classes carry no training label
    nn::Example ex;
    ex.values = std::move(rec.features);
    ex.rows = rec.rows;
    ex.cols = rec.cols;
    ex.label = static_cast<std::uint32_t>(it - known.begin());
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<EvalExample> load_split_raw(const std::string& dataset_dir, Split split) {
  DatasetReader reader(split_path(dataset_dir, split));
  const std::vector<std::string> known = reader.manifest().known_class_names();
  std::vector<EvalExample> out;
  Record rec;
  while (reader.next(rec)) {
    if (rec.iq.empty()) throw IoError("record has no raw I/Q; rebuild the dataset with keep_iq");
    EvalExample ex;
    ex.class_name = to_string(static_cast<ClassId>(rec.class_id));
    const auto it = std::find(known.begin(), known.end(), ex.class_name);
    ex.known_index = it == known.end() ? -1 : static_cast<int>(it - known.begin());
    ex.clean_slice.sample_rate_hz = rec.sample_rate_hz;
    ex.clean_slice.label = static_cast<ClassId>(rec.class_id);
    ex.clean_slice.samples.reserve(rec.iq.size() / 2);
    for (std::size_t i = 0; i + 1 < rec.iq.size(); i += 2)
      ex.clean_slice.samples.emplace_back(rec.iq[i], rec.iq[i + 1]);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace osrf
