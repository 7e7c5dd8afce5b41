#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rlsurv/checkpoint.hpp"
#include "rlsurv/dataset.hpp"

using namespace rlsurv;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

// Invokes the installed binary through the shell, capturing combined output.
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string capture = "tmp_cli_out_" + std::to_string(counter++);
  const std::string cmd =
      std::string(RLSURV_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  fs::remove(capture);
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

// Small separable dataset so sub-second training budgets classify well.
void write_toy_csv(const std::string& path) {
  DeviceSpec spec;
  spec.name = "toy";
  spec.n_normal = 400;
  spec.n_failure = 40;
  spec.normal_mean << 10, 20, 30, 40;
  spec.normal_std << 1, 1, 1, 1;
  spec.failure_shift << 8, -8, 8, 8;
  spec.overlap = 0.0;
  spec.seed = 9;
  save_csv(generate(spec), path);
}

}  // namespace

TEST_CASE("generate writes presets deterministically") {
  TempDir dir("tmp_cli_gen");
  const auto a =
      run_cli("generate --preset device1 -o " + dir.str() + "/a.csv");
  CHECK(a.code == 0);
  CHECK(a.output.find("8717 normal") != std::string::npos);
  CHECK(a.output.find("44 failure") != std::string::npos);

  const std::string body = slurp(dir.path / "a.csv");
  CHECK(std::count(body.begin(), body.end(), '\n') == 8762);

  const auto b =
      run_cli("generate --preset device1 -o " + dir.str() + "/b.csv");
  CHECK(b.code == 0);
  CHECK(slurp(dir.path / "b.csv") == body);

  const auto c = run_cli("generate --preset device1 --seed 99 -o " +
                         dir.str() + "/c.csv");
  CHECK(c.code == 0);
  CHECK(slurp(dir.path / "c.csv") != body);
}

TEST_CASE("unknown preset is a usage error listing the presets") {
  const auto r = run_cli("generate --preset device9 -o nowhere.csv");
  CHECK(r.code == 2);
  CHECK(r.output.find("device9") != std::string::npos);
  CHECK(r.output.find("device1") != std::string::npos);
  CHECK(r.output.find("device3") != std::string::npos);
}

TEST_CASE("the seed environment variable fills in when no flag is given") {
  TempDir dir("tmp_cli_envseed");
  const auto flagged = run_cli("generate --preset device1 --seed 7 -o " +
                               dir.str() + "/flag.csv");
  CHECK(flagged.code == 0);
  // The helper prefixes the binary itself; exporting a variable needs a
  // direct shell invocation.
  const std::string cmd = "RLSURV_SEED=7 " + std::string(RLSURV_CLI_PATH) +
                          " generate --preset device1 -o " + dir.str() +
                          "/env2.csv > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(dir.path / "env2.csv") == slurp(dir.path / "flag.csv"));

  const std::string bad = "RLSURV_SEED=abc " + std::string(RLSURV_CLI_PATH) +
                          " generate --preset device1 -o " + dir.str() +
                          "/bad.csv > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}

TEST_CASE("train writes a loadable checkpoint and a curve") {
  TempDir dir("tmp_cli_train");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto r = run_cli("train --data " + dir.str() +
                         "/toy.csv --algorithm ddqn --seed 1 --total-steps "
                         "400 --out " + dir.str() + "/out");
  CHECK(r.code == 0);
  CHECK(r.output.find("best val f1") != std::string::npos);

  const AgentCheckpoint cp =
      load_agent_checkpoint(dir.str() + "/out/model.json");
  CHECK(cp.config.seed == 1);
  CHECK(cp.config.total_steps == 400);
  CHECK(cp.step_count == 400);

  const std::string curve = slurp(dir.path / "out" / "curve.csv");
  CHECK(curve.rfind("step,epsilon,mean_loss,val_f1", 0) == 0);
  CHECK(std::count(curve.begin(), curve.end(), '\n') >= 2);
}

TEST_CASE("train rejects a fraction outside (0,1)") {
  TempDir dir("tmp_cli_badfrac");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto r = run_cli("train --data " + dir.str() +
                         "/toy.csv --test-fraction 1.5 --out " + dir.str());
  CHECK(r.code == 2);
  CHECK(r.output.find("--test-fraction") != std::string::npos);
}

TEST_CASE("a zero-step budget still writes a valid untrained checkpoint") {
  TempDir dir("tmp_cli_zerosteps");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto r = run_cli("train --data " + dir.str() +
                         "/toy.csv --algorithm dqn --seed 3 --total-steps 0 "
                         "--out " + dir.str() + "/out");
  CHECK(r.code == 0);
  const AgentCheckpoint cp =
      load_agent_checkpoint(dir.str() + "/out/model.json");
  CHECK(cp.step_count == 0);
  CHECK(cp.config.algorithm == Algorithm::dqn);
}

TEST_CASE("a config file drives training and unknown fields are named") {
  TempDir dir("tmp_cli_cfg");
  write_toy_csv(dir.str() + "/toy.csv");
  {
    std::ofstream cfg(dir.str() + "/cfg.json");
    cfg << R"({"agent": {"total_steps": 300, "gamma": 0.5}})";
  }
  const auto ok = run_cli("train --data " + dir.str() + "/toy.csv --config " +
                          dir.str() + "/cfg.json --seed 1 --out " + dir.str() +
                          "/out");
  CHECK(ok.code == 0);
  const AgentCheckpoint cp =
      load_agent_checkpoint(dir.str() + "/out/model.json");
  CHECK(cp.config.total_steps == 300);
  CHECK(cp.config.gamma == 0.5);

  {
    std::ofstream cfg(dir.str() + "/bad.json");
    cfg << R"({"agent": {"gamm": 0.5}})";
  }
  const auto bad = run_cli("train --data " + dir.str() + "/toy.csv --config " +
                           dir.str() + "/bad.json --out " + dir.str() + "/o2");
  CHECK(bad.code == 2);
  CHECK(bad.output.find("gamm") != std::string::npos);
}

TEST_CASE("evaluate scores a checkpoint against the held-out split") {
  TempDir dir("tmp_cli_eval");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto tr = run_cli("train --data " + dir.str() +
                          "/toy.csv --algorithm ann --seed 1 --out " +
                          dir.str() + "/out");
  REQUIRE(tr.code == 0);

  const auto ev = run_cli("evaluate --model " + dir.str() +
                          "/out/model.json --data " + dir.str() +
                          "/toy.csv --out " + dir.str() + "/rep");
  CHECK(ev.code == 0);
  CHECK(ev.output.find("ann on") != std::string::npos);
  CHECK(ev.output.find("f1=") != std::string::npos);
  CHECK(fs::exists(dir.path / "rep" / "comparison.csv"));
}

TEST_CASE("external predictions join against an exported test split") {
  TempDir dir("tmp_cli_preds");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto ex = run_cli("evaluate --data " + dir.str() +
                          "/toy.csv --seed 1 --export-test " + dir.str() +
                          "/test.csv");
  REQUIRE(ex.code == 0);
  const Dataset test = load_csv(dir.str() + "/test.csv");

  // A fake external model that always predicts the majority class.
  {
    std::ofstream preds(dir.str() + "/preds.csv");
    preds << "row_index,pred\n";
    for (std::size_t i = 0; i < test.size(); ++i) preds << i << ",0\n";
  }
  const auto ev = run_cli("evaluate --data " + dir.str() +
                          "/toy.csv --seed 1 --preds " + dir.str() +
                          "/preds.csv --algorithm lightgbm");
  CHECK(ev.code == 0);
  CHECK(ev.output.find("lightgbm on") != std::string::npos);
  CHECK(ev.output.find("f1=0 ") != std::string::npos);
  CHECK(ev.output.find("tp=0") != std::string::npos);
}

TEST_CASE("compare runs the grid and is byte-stable under zero timing") {
  TempDir dir("tmp_cli_cmp");
  write_toy_csv(dir.str() + "/toy.csv");
  const std::string base =
      "compare --device " + dir.str() +
      "/toy.csv --algorithm ddqn --algorithm ann --test-fraction 0.5 "
      "--seed 1 --seed 2 --total-steps 300 --timing zero --out ";
  const auto a = run_cli(base + dir.str() + "/runs_a");
  CHECK(a.code == 0);
  CHECK(a.output.find("4 runs") != std::string::npos);

  const std::string csv = slurp(dir.path / "runs_a" / "comparison.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows

  const auto b = run_cli(base + dir.str() + "/runs_b");
  CHECK(b.code == 0);
  CHECK(slurp(dir.path / "runs_b" / "comparison.csv") == csv);
}

TEST_CASE("report regenerates artifacts from an existing comparison csv") {
  TempDir dir("tmp_cli_rep");
  write_toy_csv(dir.str() + "/toy.csv");
  const auto cmp = run_cli("compare --device " + dir.str() +
                           "/toy.csv --algorithm ann --test-fraction 0.5 "
                           "--seed 1 --timing zero --out " + dir.str() +
                           "/runs");
  REQUIRE(cmp.code == 0);
  const auto rep = run_cli("report " + dir.str() + "/runs/comparison.csv "
                           "--out " + dir.str() + "/rebuilt");
  CHECK(rep.code == 0);
  CHECK(slurp(dir.path / "rebuilt" / "comparison.csv") ==
        slurp(dir.path / "runs" / "comparison.csv"));
  CHECK(fs::exists(dir.path / "rebuilt" / "summary.md"));
  CHECK(fs::exists(dir.path / "rebuilt" / "f1_bars.svg"));
}

TEST_CASE("a failing run names its grid cell") {
  TempDir dir("tmp_cli_fail");
  write_toy_csv(dir.str() + "/toy.csv");
  // Starve the minority class: at this fraction the train split keeps too
  // few failure rows, so the split itself must refuse.
  const auto r = run_cli("compare --device " + dir.str() +
                         "/toy.csv --algorithm ann --test-fraction 0.99 "
                         "--seed 1 --out " + dir.str() + "/runs");
  CHECK(r.code != 0);
}
