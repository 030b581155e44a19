#include <fstream>

#include <nlohmann/json.hpp>

#include "osrf/binio.hpp"
#include "osrf/crc32.hpp"
#include "osrf/errors.hpp"
#include "osrf/nn.hpp"

namespace osrf::nn {

namespace {

constexpr char kMagic[8] = {'O', 'S', 'R', 'F', 'M', 'D', 'L', '1'};
constexpr std::uint32_t kVersion = 1;

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  nlohmann::json header;
  header["descriptor"] = model.descriptor();
  header["classes"] = model.class_names();
  header["input_shape"] = model.input_shape();
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> buf;
  put_bytes(buf, kMagic, sizeof(kMagic));
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(header_text.size()));
  put_bytes(buf, header_text.data(), header_text.size());
  for (const Tensor* p : model.parameters()) {
    put_u64(buf, p->data.size());
    for (double v : p->data) put_f64(buf, v);
  }
  put_u32(buf, crc32(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write to " + path);
}

Model load_model(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < sizeof(kMagic) + 12) throw IoError("model file too short: " + path);

  ByteReader tail(bytes.data() + bytes.size() - 4, 4);
  const std::uint32_t file_crc = tail.u32();
  if (crc32(bytes.data(), bytes.size() - 4) != file_crc)
    throw ChecksumMismatch("model file checksum mismatch: " + path);

  ByteReader r(bytes.data(), bytes.size() - 4);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw IoError("not a model file: " + path);
  const std::uint32_t version = r.u32();
  if (version > kVersion) throw VersionMismatch("model file version " + std::to_string(version) + " is newer than this build");

  const std::uint32_t header_len = r.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(header_len));
  } catch (const nlohmann::json::exception&) {
    throw IoError("unreadable model header: " + path);
  }

  Model model = Model::build(header.at("descriptor").get<std::string>(),
                             header.at("input_shape").get<std::vector<std::size_t>>(),
                             header.at("classes").get<std::vector<std::string>>(), 0);
  for (Tensor* p : model.parameters()) {
    const std::uint64_t count = r.u64();
    if (count != p->data.size()) throw IoError("parameter count mismatch in " + path);
    for (double& v : p->data) v = r.f64();
  }
  if (r.remaining() != 0) throw IoError("trailing bytes in model file: " + path);
  return model;
}

std::uint32_t file_checksum(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return crc32(bytes.data(), bytes.size());
}

}  // namespace osrf::nn
