#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "osrf/openset.hpp"

// End-to-end checks against the installed binary; OSRF_CLI points at it.
namespace {

namespace fs = std::filesystem;

std::string cli() {
  const char* path = std::getenv("OSRF_CLI");
  REQUIRE_MESSAGE(path != nullptr, "OSRF_CLI must point at the executable");
  return path;
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) output += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

std::string workdir() {
  static std::string dir = [] {
    const auto d = fs::temp_directory_path() / "osrf_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
  }();
  return dir;
}

std::string write_config(const std::string& name, const std::string& json) {
  const std::string path = workdir() + "/" + name;
  std::ofstream out(path);
  out << json;
  return path;
}

std::string tiny_config(const std::string& out_dir) {
  return std::string("{\n") +
         "  \"known_classes\": [\"lte_dl\", \"nbiot\"],\n" +
         "  \"unknown_classes\": [\"am\"],\n" +
         "  \"base_signals_per_class\": 10,\n" +
         "  \"slice\": {\"slice_len\": 2048, \"n_slices_per_signal\": 3, \"fft_len\": 1024, \"n_segments\": 2},\n" +
         "  \"impairments\": {\"snr_train_db\": [5, 20]},\n" +
         "  \"architecture\": \"conv:6,relu,pool:8,dense:16,relu\",\n" +
         "  \"train\": {\"epochs\": 3, \"batch_size\": 16},\n" +
         "  \"snr_grid_db\": [0, 10],\n" +
         "  \"seed\": 3,\n" +
         "  \"out_dir\": \"" + out_dir + "\"\n" +
         "}\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: full pipeline with reproducible outputs") {
  const std::string out1 = workdir() + "/run1";
  const std::string cfg1 = write_config("run1.json", tiny_config(out1));

  RunResult gen = run("generate --config " + cfg1);
  CHECK(gen.exit_code == 0);
  CHECK(gen.output.find("train: 48 records") != std::string::npos);
  CHECK(fs::exists(out1 + "/generate.config.json"));
  CHECK(fs::exists(out1 + "/dataset/manifest.json"));

  RunResult tr = run("train --config " + cfg1);
  CHECK(tr.exit_code == 0);
  CHECK(fs::exists(out1 + "/model.osrfmdl"));
  // Loss log has exactly `epochs` rows plus header.
  std::ifstream loss(out1 + "/train_loss.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(loss, line);
  CHECK(line == "epoch,mean_loss");
  while (std::getline(loss, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);

  // A rerun in a second directory produces identical artifacts.
  const std::string out2 = workdir() + "/run2";
  const std::string cfg2 = write_config("run2.json", tiny_config(out2));
  CHECK(run("generate --config " + cfg2).exit_code == 0);
  CHECK(run("train --config " + cfg2).exit_code == 0);
  CHECK(slurp(out1 + "/dataset/train.osrf") == slurp(out2 + "/dataset/train.osrf"));
  CHECK(slurp(out1 + "/model.osrfmdl") == slurp(out2 + "/model.osrfmdl"));

  RunResult ec = run("eval-closed --config " + cfg1);
  CHECK(ec.exit_code == 0);
  CHECK(ec.output.find("overall") != std::string::npos);

  RunResult eo = run("eval-open --config " + cfg1 + " --threshold 0.9");
  CHECK(eo.exit_code == 0);

  RunResult sw = run("sweep-threshold --config " + cfg1);
  CHECK(sw.exit_code == 0);
  CHECK(sw.output.find("balanced-objective threshold") != std::string::npos);
  // The emitted sweep CSV parses and keeps the exact monotone invariants.
  std::string sweep_path;
  {
    std::stringstream ss(sw.output);
    std::getline(ss, sweep_path);
  }
  const auto table = osrf::read_sweep_csv(sweep_path);
  REQUIRE(!table.empty());
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i].known_accuracy <= table[i - 1].known_accuracy);
    CHECK(table[i].unknown_detection_rate >= table[i - 1].unknown_detection_rate);
  }
}

TEST_CASE("cli: classify emits a verdict with all activations") {
  const std::string out = workdir() + "/run1";
  REQUIRE(fs::exists(out + "/model.osrfmdl"));  // built by the pipeline case

  // 2048 complex samples of a constant tone, float32 interleaved.
  const std::string iq_path = workdir() + "/capture.iq";
  {
    std::ofstream f(iq_path, std::ios::binary);
    for (int i = 0; i < 2048; ++i) {
      const float re = 1.0f, im = 0.0f;
      f.write(reinterpret_cast<const char*>(&re), 4);
      f.write(reinterpret_cast<const char*>(&im), 4);
    }
  }
  RunResult res = run("classify --model " + out + "/model.osrfmdl --input " + iq_path +
                      " --rate-hz 3.84e6 --threshold 0.5");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"verdict\"") != std::string::npos);
  CHECK(res.output.find("\"lte_dl\"") != std::string::npos);
  CHECK(res.output.find("\"nbiot\"") != std::string::npos);

  // Too-short capture: usage error.
  const std::string short_path = workdir() + "/short.iq";
  {
    std::ofstream f(short_path, std::ios::binary);
    const float v = 0.5f;
    for (int i = 0; i < 100; ++i) f.write(reinterpret_cast<const char*>(&v), 4);
  }
  CHECK(run("classify --model " + out + "/model.osrfmdl --input " + short_path + " --rate-hz 1e6").exit_code ==
        2);
}

TEST_CASE("cli: exit codes for config and i/o failures") {
  // Split fractions that do not sum to 1 -> exit 2 with a field-level message.
  const std::string bad_split = write_config("bad_split.json",
                                             "{\"split\": [0.9, 0.2, 0.1], \"out_dir\": \"" + workdir() +
                                                 "/bad\"}");
  RunResult r1 = run("generate --config " + bad_split);
  CHECK(r1.exit_code == 2);
  CHECK(r1.output.find("split") != std::string::npos);

  // Unknown keys are rejected.
  const std::string unknown_key = write_config("unknown_key.json", "{\"surprise\": true}");
  RunResult r2 = run("generate --config " + unknown_key);
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("surprise") != std::string::npos);

  // Missing dataset -> i/o failure.
  const std::string ok = write_config("ok.json", tiny_config(workdir() + "/void"));
  RunResult r3 = run("train --config " + ok + " --out-dir " + workdir() + "/void");
  CHECK(r3.exit_code == 3);

  // Unparseable command line -> usage error.
  CHECK(run("no-such-command").exit_code == 2);
  CHECK(run("train --config " + workdir() + "/missing.json").exit_code == 3);
}
