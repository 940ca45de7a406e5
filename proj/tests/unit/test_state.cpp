#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "adaptmt/error.hpp"
#include "adaptmt/state.hpp"
#include "doctest.h"

using namespace adaptmt;
using namespace adaptmt::state;

namespace {

json schizophrenia_doc(const char* method) {
  json doc = json::parse(R"({
    "graph": {"names": ["H1", "H2", "H3", "H4"], "weights": [0.5, 0.5, 0, 0],
              "transition": [[0, 0.5, 0.5, 0], [0.5, 0, 0, 0.5], [0, 1, 0, 0], [1, 0, 0, 0]]},
    "correlation": [{"members": [1, 2], "equicorrelated": 0.5}, {"members": [3, 4], "equicorrelated": 0.5}],
    "alpha": 0.025, "info_fraction": 0.5})");
  doc["method"] = method;
  return doc;
}

const json& cer_adaptation() {
  static const json a = json::parse(R"({
    "selected": [2, 4],
    "graph": {"nodes": [2, 4], "weights": [0.5, 0.5], "transition": [[0, 1], [1, 0]]},
    "sample_sizes": {"stage1": [35, 35], "stage2": [52, 53]}})");
  return a;
}

const std::vector<double> kP1{0.00045, 0.0952, 0.0225, 0.1104};

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

struct TempFile {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / ("adaptmt_state_" + std::to_string(std::rand()) + ".json");
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("design documents parse and name bad fields") {
  const DesignSpec d = parse_design(schizophrenia_doc("CER"));
  CHECK(d.method == MethodTag::Cer);
  CHECK(d.size() == 4);
  CHECK(parse_design(to_json(d)) == d);

  auto missing = schizophrenia_doc("CER");
  missing["graph"].erase("weights");
  CHECK(error_of([&] { parse_design(missing); }).find("graph.weights") != std::string::npos);
  auto heavy = schizophrenia_doc("CER");
  heavy["graph"]["weights"] = {0.7, 0.7, 0, 0};
  CHECK(error_of([&] { parse_design(heavy); }).find("graph") != std::string::npos);
  auto alpha = schizophrenia_doc("CER");
  alpha["alpha"] = "small";
  CHECK(error_of([&] { parse_design(alpha); }).find("alpha") != std::string::npos);
  auto block = schizophrenia_doc("CER");
  block["correlation"][1]["members"] = {3, 9};
  CHECK(error_of([&] { parse_design(block); }).find("correlation[1].members") != std::string::npos);
  auto method = schizophrenia_doc("Bayes");
  CHECK(error_of([&] { parse_design(method); }).find("method") != std::string::npos);
  auto nu = schizophrenia_doc("Combo");
  nu["combination_weights"] = {0.6, 0.6};
  CHECK(error_of([&] { parse_design(nu); }).find("combination_weights") != std::string::npos);
}

TEST_CASE("design hash tracks the design") {
  const DesignSpec d = parse_design(schizophrenia_doc("CER"));
  CHECK(design_hash(d).size() == 16);
  CHECK(design_hash(d) == design_hash(parse_design(schizophrenia_doc("CER"))));
  DesignSpec e = d;
  e.alpha = 0.02;
  CHECK(design_hash(e) != design_hash(d));
}

TEST_CASE("state round trips field for field at every stage") {
  for (const char* method : {"CER", "Combo"}) {
    CAPTURE(method);
    const bool cer = std::string(method) == "CER";
    const TrialState planned = plan_trial(parse_design(schizophrenia_doc(method)));
    const TrialState interim = record_interim(planned, kP1);
    const TrialState adapted =
        record_adaptation(interim, cer ? cer_adaptation() : json::parse(R"({"selected": [2, 3, 4]})"));
    const TrialState fin = record_final(adapted, cer ? std::vector{1.0, 0.0299, 1.0, 0.0586} : std::vector{1.0, 0.1121, 0.0112, 0.1153});
    for (const TrialState* s : {&planned, &interim, &adapted, &fin}) {
      const TrialState back = from_json(json::parse(to_json(*s).dump()));
      CHECK(back == *s);
      CHECK(to_json(back).dump() == to_json(*s).dump());
    }
    TempFile f;
    save_state(fin, f.path.string());
    CHECK(load_state(f.path.string()) == fin);
    CHECK(fin.stage == Stage::Final);
    CHECK(fin.final_record->stage1_rejected == IndexSet::of1({1}));
    CHECK(fin.final_record->stage2_rejected == (cer ? IndexSet::of1({2, 4}) : IndexSet::of1({3})));
  }
}

TEST_CASE("cer workflow records the worked example") {
  const TrialState s = record_interim(plan_trial(parse_design(schizophrenia_doc("CER"))), kP1);
  REQUIRE(s.plan.size() == 15);
  CHECK(std::abs(s.plan.front().level1 - 0.001564) <= 1e-6);
  for (const auto& r : s.interim->rows)
    if (r.J == IndexSet::of1({3})) CHECK(std::abs(r.value - 0.2179) <= 1e-3);
  const TrialState a = record_adaptation(s, cer_adaptation());
  REQUIRE(a.adaptation.has_value());
  CHECK(std::abs(a.adaptation->info_fraction[1] - 0.4) <= 1e-3);
  const TrialState f = record_final(a, std::vector{0.0299, 0.0586});
  CHECK(std::abs(f.final_record->cumulative[1] - 0.0111) <= 5e-4);
  CHECK(std::abs(f.final_record->cumulative[3] - 0.0234) <= 5e-4);
  const TrialState already = record_final(a, std::vector{0.0111, 0.0234}, true);
  CHECK(already.final_record->stage2_rejected == IndexSet::of1({2, 4}));
}

TEST_CASE("lifecycle is enforced and inputs are untouched") {
  const TrialState planned = plan_trial(parse_design(schizophrenia_doc("CER")));
  const json before = to_json(planned);
  CHECK_THROWS_AS(record_final(planned, std::vector(4, 0.5)), ValidationError);
  CHECK_THROWS_AS(record_adaptation(planned, cer_adaptation()), ValidationError);
  CHECK(to_json(planned) == before);
  const TrialState interim = record_interim(planned, kP1);
  CHECK_THROWS_AS(record_interim(interim, kP1), ValidationError);
  CHECK_THROWS_AS(record_interim(planned, std::vector(3, 0.5)), ValidationError);
  CHECK_THROWS_AS(record_interim(planned, std::vector{0.1, 0.2, 1.5, 0.3}), ValidationError);
  const TrialState fin = record_final(interim, std::vector(4, 1.0));
  CHECK(fin.final_record->stage2_rejected.empty());
  CHECK(fin.final_record->stage1_rejected == IndexSet::of1({1}));
  CHECK_THROWS_AS(record_final(fin, std::vector(4, 0.5)), ValidationError);
  CHECK_THROWS_AS(record_adaptation(fin, cer_adaptation()), ValidationError);
}

TEST_CASE("adaptation checks") {
  const TrialState s = record_interim(plan_trial(parse_design(schizophrenia_doc("CER"))), kP1);
  auto early = cer_adaptation();
  early["selected"] = {1, 2};
  early.erase("graph");
  CHECK(error_of([&] { record_adaptation(s, early); }).find("selected") != std::string::npos);

  auto stray = cer_adaptation();
  stray["graph"] = json::parse(R"({"weights": [0, 0.5, 0.5, 0], "transition": [[0,0,0,0],[0,0,1,0],[0,1,0,0],[0,0,0,0]]})");
  CHECK(error_of([&] { record_adaptation(s, stray); }).find("graph.weights") != std::string::npos);

  const TrialState id = record_adaptation(s, json::parse(R"({"selected": [2, 3, 4]})"));
  const auto& plan = id.plan;
  for (const auto& b : id.adaptation->boundaries) {
    for (const auto& p : plan)
      if (p.J == b.J) CHECK(std::abs(b.c2 - p.level2) <= 1e-6);
  }
}

TEST_CASE("tampering is detected") {
  TrialState s = record_interim(plan_trial(parse_design(schizophrenia_doc("CER"))), kP1);
  json doc = to_json(s);
  doc["design"]["alpha"] = 0.05;
  CHECK(error_of([&] { from_json(doc); }).find("hash") != std::string::npos);
  json stale = to_json(s);
  stale["interim"]["design_hash"] = "0000000000000000";
  CHECK(error_of([&] { from_json(stale); }).find("hash") != std::string::npos);
  json version = to_json(s);
  version["schema_version"] = 99;
  CHECK(error_of([&] { from_json(version); }).find("schema_version") != std::string::npos);
  json stage = to_json(s);
  stage["stage"] = "final";
  CHECK_THROWS_AS(from_json(stage), ValidationError);
}

TEST_CASE("single hypothesis design") {
  const json doc = json::parse(R"({"method": "CER", "graph": {"weights": [1], "transition": [[0]]}})");
  const TrialState s = plan_trial(parse_design(doc));
  REQUIRE(s.plan.size() == 1);
  CHECK(std::abs(s.plan[0].level1 - 0.001525) <= 1e-5);
  CHECK(std::abs(s.plan[0].level2 - 0.0245) <= 5e-4);
  json combo = doc;
  combo["method"] = "Combo";
  const TrialState c = plan_trial(parse_design(combo));
  CHECK(std::abs(c.plan[0].level1 - 0.001525) <= 1e-5);
  CHECK(std::abs(c.plan[0].level2 - 0.0245) <= 5e-4);
}

TEST_CASE("missing files are validation errors") {
  CHECK_THROWS_AS(load_state("/nonexistent/dir/state.json"), ValidationError);
  TempFile f;
  std::ofstream(f.path) << "{ not json";
  CHECK_THROWS_AS(load_state(f.path.string()), ValidationError);
}
