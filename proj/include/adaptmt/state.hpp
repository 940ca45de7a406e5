#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaptmt/cer.hpp"
#include "adaptmt/combo.hpp"
#include "json.hpp"

namespace adaptmt::state {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class MethodTag { Cer, Combo };
const char* to_string(MethodTag m);

enum class Stage { Planned, Interim, Adapted, Final };
const char* to_string(Stage s);

// Design document. Indices in documents are 1-based.
struct DesignSpec {
  MethodTag method = MethodTag::Cer;
  std::vector<std::string> names;
  std::vector<double> weights;
  std::vector<std::vector<double>> transition;
  json correlation = json::array();  // knowledge blocks as written
  double alpha = 0.025;
  double info_fraction = 0.5;
  double nu1 = 0.7071067811865476;
  double nu2 = 0.7071067811865476;

  int size() const { return static_cast<int>(weights.size()); }
  WeightingGraph graph() const;
  CorrelationKnowledge knowledge() const;
  ComboDesign combo_design() const;
  CerDesign cer_design() const;
  bool operator==(const DesignSpec&) const = default;
};

// Throws ValidationError naming the offending field.
DesignSpec parse_design(const json& doc);
json to_json(const DesignSpec& d);

// Correlation blocks: [{"members": [1,2], "matrix": [[...]]}],
// {"members": [...], "equicorrelated": r} or
// {"members": [...], "many_to_one": {"treatment": [n...], "control": n}}.
CorrelationKnowledge parse_knowledge(const json& blocks, int k, const std::string& field);

// FNV-1a over the canonical serialization of the design, as 16 hex digits.
std::string design_hash(const DesignSpec& d);

struct PlanRow {
  IndexSet J;
  TestType type = TestType::NA;
  std::vector<double> weights;  // full length
  double level1 = 0.0;          // alpha_{J,1} (Combo) or c_{J,1} (CER)
  double level2 = 0.0;          // alpha_{J,2} (Combo) or c_{J,2} (CER)
  bool operator==(const PlanRow&) const = default;
};

struct InterimRow {
  IndexSet J;
  TestType type = TestType::NA;
  double value = 1.0;  // adjusted stage-one p (Combo) or B_J (CER, open sets)
  bool rejected = false;
  bool operator==(const InterimRow&) const = default;
};

struct InterimRecord {
  std::string design_hash;
  std::vector<double> p1;
  IndexSet early_rejected;
  std::vector<InterimRow> rows;
  bool operator==(const InterimRecord&) const = default;
};

struct BoundaryRow {
  IndexSet J;
  JGroup group = JGroup::A;
  TestType type = TestType::NA;
  double B = 0.0;
  double c2 = 0.0;
  bool reject_outright = false;
  std::vector<double> weights;  // stage-two weights, full length
  bool operator==(const BoundaryRow&) const = default;
};

struct AdaptationRecord {
  std::string design_hash;
  IndexSet selected;
  std::optional<std::vector<double>> weights;  // revised graph, full length
  std::optional<std::vector<std::vector<double>>> transition;
  std::vector<double> info_fraction;  // full length
  std::optional<json> correlation;    // stage-two knowledge blocks
  std::vector<BoundaryRow> boundaries;
  bool operator==(const AdaptationRecord&) const = default;

  Adaptation to_adaptation(const DesignSpec& d) const;
};

struct AuditRow {
  IndexSet J;
  JGroup group = JGroup::Rejected;
  TestType type = TestType::NA;
  double stat1 = 0.0;  // p_J1 (Combo) or B_J (CER)
  double stat2 = 0.0;  // p_J2 (Combo) or c~_J2 (CER)
  double combined = 1.0;  // Combo only
  bool rejected = false;
  bool operator==(const AuditRow&) const = default;
};

struct FinalRecord {
  std::string design_hash;
  std::vector<double> p2;          // as entered, full length (unselected = 1)
  std::vector<double> cumulative;  // CER: cumulative stage-two p-values
  IndexSet stage1_rejected;
  IndexSet stage2_rejected;
  std::vector<AuditRow> audit;
  bool operator==(const FinalRecord&) const = default;
};

struct TrialState {
  int schema_version = kSchemaVersion;
  Stage stage = Stage::Planned;
  DesignSpec design;
  std::string design_hash;
  std::vector<PlanRow> plan;
  std::optional<InterimRecord> interim;
  std::optional<AdaptationRecord> adaptation;
  std::optional<FinalRecord> final_record;
  bool operator==(const TrialState&) const = default;
};

json to_json(const TrialState& s);
// Checks schema version, lifecycle consistency and every embedded design hash.
TrialState from_json(const json& doc);

TrialState load_state(const std::string& path);
// Writes to a temporary file and renames it over path.
void save_state(const TrialState& s, const std::string& path);

// Workflow steps. Each checks the lifecycle stage and returns a new state;
// the input is never modified.
TrialState plan_trial(const DesignSpec& design);
TrialState record_interim(const TrialState& s, const std::vector<double>& p1);
// Adaptation document: {"selected": [2,4], "graph": {...}, "info_fraction": x | [..],
// "sample_sizes": {"stage1": [nt, nc], "stage2": [nt, nc]}, "correlation": [...]}.
TrialState record_adaptation(const TrialState& s, const json& doc);
// p2: incremental stage-two p-values (full length, or one per selected
// hypothesis in ascending order). For CER, cumulative = true means they are
// already cumulative.
TrialState record_final(const TrialState& s, const std::vector<double>& p2, bool cumulative = false);

}  // namespace adaptmt::state
