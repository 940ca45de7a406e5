#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptmt/cli.hpp"
#include "adaptmt/state.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "adaptmt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Result r;
  r.code = adaptmt::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string config(const char* name) { return std::string(ADAPTMT_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("adaptmt_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"plan", "--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"plan", "--config", config("schizophrenia_cer.json")}).code == 1);
  CHECK(run({"weights", "--config", config("schizophrenia_cer.json"), "--format", "xml"}).code == 1);
}

TEST_CASE("validate and weights") {
  CHECK(run({"validate", "--config", config("schizophrenia_cer.json")}).code == 0);
  CHECK(run({"validate", "--config", config("schizophrenia_combo.json")}).code == 0);
  const auto t11 = run({"validate", "--config", config("table11.cfg")});
  CHECK(t11.code == 0);
  CHECK(t11.out.find("12 cells") != std::string::npos);
  CHECK(run({"validate", "--config", config("tableB1_S1.cfg")}).code == 0);
  const auto w = run({"weights", "--config", config("schizophrenia_cer.json"), "--format", "csv"});
  CHECK(w.code == 0);
  CHECK(w.out.find("{2,3,4}") != std::string::npos);

  TempDir d;
  std::ofstream(d / "bad.json") << R"({"method": "CER", "graph": {"weights": [0.7, 0.7], "transition": [[0,1],[1,0]]}})";
  const auto bad = run({"validate", "--config", d / "bad.json"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("graph") != std::string::npos);
  CHECK(run({"validate", "--config", d / "missing.json"}).code == 1);
}

TEST_CASE("conditional error workflow") {
  TempDir d;
  const std::string st = d / "trial.json";
  const auto plan = run({"plan", "--config", config("schizophrenia_cer.json"), "--state", st, "--format", "csv"});
  REQUIRE(plan.code == 0);
  CHECK(plan.out.find("0.0132") != std::string::npos);
  CHECK(run({"final", "--state", st, "--p", "0.1,0.1,0.1,0.1"}).code == 1);

  const auto interim = run({"interim", "--state", st, "--p", "0.00045,0.0952,0.0225,0.1104"});
  REQUIRE(interim.code == 0);
  CHECK(interim.out.find("0.2179") != std::string::npos);

  const std::string before = slurp(st);
  CHECK(run({"interim", "--state", st, "--p", "0.1,0.1,0.1,0.1"}).code == 1);
  CHECK(slurp(st) == before);

  REQUIRE(run({"adapt", "--state", st, "--config", config("schizophrenia_cer_adapt.json")}).code == 0);
  const auto fin = run({"final", "--state", st, "--p", "0.0299,0.0586", "--out", d / "final.txt"});
  REQUIRE(fin.code == 0);
  CHECK(fs::exists(d / "final.txt"));

  const auto s = adaptmt::state::load_state(st);
  CHECK(s.stage == adaptmt::state::Stage::Final);
  CHECK(s.final_record->stage1_rejected == adaptmt::IndexSet::of1({1}));
  CHECK(s.final_record->stage2_rejected == adaptmt::IndexSet::of1({2, 4}));
}

TEST_CASE("combination workflow with implicit identity adaptation") {
  TempDir d;
  const std::string st = d / "combo.json";
  REQUIRE(run({"plan", "--config", config("schizophrenia_combo.json"), "--state", st}).code == 0);
  REQUIRE(run({"interim", "--state", st, "--p", "0.00045,0.0952,0.0225,0.1104"}).code == 0);
  const auto fin = run({"final", "--state", st, "--p", "1,0.1121,0.0112,0.1153", "--format", "csv"});
  REQUIRE(fin.code == 0);
  CHECK(fin.out.find("0.0012") != std::string::npos);
  const auto s = adaptmt::state::load_state(st);
  CHECK(s.final_record->stage2_rejected == adaptmt::IndexSet::of1({3}));
}

TEST_CASE("tampered state files are refused") {
  TempDir d;
  const std::string st = d / "trial.json";
  REQUIRE(run({"plan", "--config", config("schizophrenia_cer.json"), "--state", st}).code == 0);
  auto doc = nlohmann::json::parse(slurp(st));
  doc["design"]["alpha"] = 0.05;
  std::ofstream(st) << doc.dump();
  const auto r = run({"interim", "--state", st, "--p", "0.1,0.1,0.1,0.1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hash") != std::string::npos);
}

TEST_CASE("simulate writes csv and json") {
  TempDir d;
  std::ofstream(d / "sim.json") << R"({
    "layout": "power", "n_per_arm": 20, "seed": 5,
    "combo_replicates": 40, "cer_stage1_replicates": 4, "cer_stage2_replicates": 2,
    "scenarios": [{"label": "S1", "effects": [0.4, 0, 0, 0]}],
    "rules": "Conservative", "rho": 0.5})";
  const auto r = run({"simulate", "--config", d / "sim.json", "--out", d / "res"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("S1") != std::string::npos);
  CHECK(fs::exists(d / "res.csv"));
  const auto summary = nlohmann::json::parse(slurp(d / "res.json"));
  CHECK(summary["reports"].size() == 2);

  std::ofstream(d / "zero.json") << R"({
    "combo_replicates": 0, "cer_stage1_replicates": 4, "cer_stage2_replicates": 2,
    "scenarios": [{"label": "S1", "effects": [0.4, 0, 0, 0]}], "rules": "Conservative", "rho": 0.5})";
  CHECK(run({"simulate", "--config", d / "zero.json"}).code == 1);
  CHECK(run({"simulate", "--config", d / "sim.json", "--threads", "0"}).code == 1);
}
