#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "lookdrift/io.hpp"
#include "lookdrift/trainer.hpp"

using namespace lookdrift;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(LOOKDRIFT_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lookdrift_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string tiny_config(const fs::path& dir) {
  const json j{{"model", {{"hidden", {16, 16}}}},
               {"batch_size_model", 32},
               {"batch_size_data", 32},
               {"steps", 20},
               {"eval", {{"every", 10}, {"samples", 64}, {"projections", 8}}},
               {"checkpoint_every", 10},
               {"seed", 4},
               {"output_dir", (dir / "run").string()}};
  atomic_write(dir / "config.json", j.dump());
  return (dir / "config.json").string();
}

std::vector<json> log_lines(const fs::path& file) {
  std::vector<json> out;
  std::istringstream in(read_file(file));
  for (std::string line; std::getline(in, line);) {
    json j = json::parse(line);
    j.erase("wallclock");
    out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("argument handling") {
  CHECK(run("--help").code == 0);
  CHECK(run("train --help").code == 0);
  CHECK(run("").code != 0);
  CHECK(run("train --config /nonexistent/config.json").code == 2);
  CHECK(run("diag --no-such-flag").code != 0);
  CHECK(run("frobnicate").code != 0);
  const fs::path dir = scratch("bad");
  atomic_write(dir / "bad.json", R"({"steps": 10, "stpes": 3})");
  CHECK(run("train --config " + (dir / "bad.json").string()).code == 2);
}

TEST_CASE("train, eval, sample, render") {
  const fs::path dir = scratch("flow");
  const std::string cfg = tiny_config(dir);
  const Result t = run("train --config " + cfg);
  REQUIRE(t.code == 0);
  CHECK(t.out == (dir / "run").string() + "\n");
  CHECK(log_lines(dir / "run" / "metrics.jsonl").size() == 2);

  const std::string ckpt = checkpoint_path(dir / "run", 20).string();
  REQUIRE(fs::exists(ckpt));

  const Result e1 = run("eval --checkpoint " + ckpt + " --n 256 --projections 16 --seed 9");
  const Result e2 = run("eval --checkpoint " + ckpt + " --n 256 --projections 16 --seed 9");
  REQUIRE(e1.code == 0);
  CHECK(e1.out == e2.out);
  const json rec = json::parse(e1.out);
  const LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const MetricReport m =
      evaluate_generator(loaded.state.ema.shadow(), loaded.config.dataset, 256, 16, 9);
  CHECK(std::abs(rec["energy_distance"].get<double>() - m.energy_distance) <= 1e-12);
  CHECK(std::abs(rec["sliced_w1"].get<double>() - m.sliced_w1) <= 1e-12);
  CHECK(rec["step"] == 20);

  const std::string csv = (dir / "s.csv").string();
  REQUIRE(run("sample --checkpoint " + ckpt + " --count 37 --seed 1 --out " + csv).code == 0);
  const std::string text = read_file(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 38);
  CHECK(parse_csv(text, csv).rows() == 37);
  CHECK(run("sample --checkpoint " + ckpt + " --count 0 --out " + csv).code != 0);

  const std::string ppm = (dir / "s.ppm").string();
  const Result r = run("render --samples " + csv + " --out " + ppm + " --resolution 32");
  REQUIRE(r.code == 0);
  CHECK(read_file(ppm).rfind("P6\n32 32\n255\n", 0) == 0);
  CHECK(json::parse(r.out)["generated"] == 37);
  CHECK(run("render --samples " + csv + " --checkpoint " + ckpt + " --out " + ppm).code != 0);

  CHECK(run("eval --checkpoint " + (dir / "config.json").string()).code == 1);
}

TEST_CASE("resume through the cli continues the log") {
  const fs::path dir = scratch("resume");
  const std::string cfg = tiny_config(dir);
  REQUIRE(run("train --config " + cfg).code == 0);
  const auto full = log_lines(dir / "run" / "metrics.jsonl");
  const std::string ckpt = checkpoint_path(dir / "run", 10).string();
  REQUIRE(run("train --config " + cfg + " --resume " + ckpt).code == 0);
  CHECK(log_lines(dir / "run" / "metrics.jsonl") == full);
}

TEST_CASE("k = 0 and the drifting method log the same run") {
  const fs::path dir = scratch("k0");
  const std::string cfg = tiny_config(dir);
  REQUIRE(run("train --config " + cfg + " --set plan.k=0 --set output_dir=" +
              (dir / "a").string()).code == 0);
  REQUIRE(run("train --config " + cfg + " --set method=drifting --set output_dir=" +
              (dir / "b").string()).code == 0);
  CHECK(log_lines(dir / "a" / "metrics.jsonl") == log_lines(dir / "b" / "metrics.jsonl"));
  CHECK(read_file(checkpoint_path(dir / "a", 20)).size() > 0);
}

TEST_CASE("diag output is byte-for-byte reproducible") {
  const Result a = run("diag --seed 3 --sizes 1,4,16 --instances 20");
  const Result b = run("diag --seed 3 --sizes 1,4,16 --instances 20");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  int lines = 0;
  for (std::string line; std::getline(in, line); ++lines) CHECK(json::parse(line)["pass"] == true);
  CHECK(lines == 6);

  const Result wrong = run("diag --seed 3 --sizes 1,4,16 --instances 20 --wrong-sign-kernel");
  CHECK(wrong.code == 1);
}
