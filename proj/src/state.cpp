#include "adaptmt/state.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adaptmt/error.hpp"
#include "adaptmt/normal.hpp"

namespace adaptmt::state {

const char* to_string(MethodTag m) { return m == MethodTag::Cer ? "CER" : "Combo"; }

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Planned: return "planned";
    case Stage::Interim: return "interim";
    case Stage::Adapted: return "adapted";
    case Stage::Final: return "final";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError("field '" + field + "': " + what);
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}


double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "expected a finite number");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> matrix(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(numbers(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

// A 1-based member list, either [1,2] or "{1,2}".
IndexSet index_set(const json& v, int k, const std::string& field) {
  try {
    if (v.is_string()) return IndexSet::parse(v.get<std::string>(), k);
  } catch (const ValidationError& e) {
    fail(field, e.what());
  }
  if (!v.is_array()) fail(field, "expected a list of 1-based indices");
  IndexSet s;
  for (const auto& x : v) {
    if (!x.is_number_integer()) fail(field, "expected integer indices");
    const int j = x.get<int>();
    if (j < 1 || j > k) fail(field, "index " + std::to_string(j) + " outside 1.." + std::to_string(k));
    if (s.contains(j - 1)) fail(field, "index " + std::to_string(j) + " repeated");
    s = s.with(j - 1);
  }
  return s;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& m, int k, const std::string& field) {
  if (static_cast<int>(m.size()) != k) fail(field, "expected " + std::to_string(k) + " rows");
  std::vector<double> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (static_cast<int>(m[i].size()) != k) fail(field + "[" + std::to_string(i) + "]", "expected " + std::to_string(k) + " entries");
    out.insert(out.end(), m[i].begin(), m[i].end());
  }
  return out;
}

void check_graph(const WeightingGraph& g, const std::string& field) {
  const ValidationReport rep = validate_graph(g);
  if (!rep.ok()) fail(field, rep.errors.front());
}

TestType parse_type(const std::string& s) {
  for (TestType t : {TestType::NA, TestType::Nonparametric, TestType::Parametric, TestType::Mixed})
    if (s == to_string(t)) return t;
  throw ValidationError("unknown test type '" + s + "'");
}

JGroup parse_group(const std::string& s) {
  for (JGroup g : {JGroup::Rejected, JGroup::A, JGroup::B, JGroup::C})
    if (s == to_string(g)) return g;
  throw ValidationError("unknown set group '" + s + "'");
}

Stage parse_stage(const std::string& s) {
  for (Stage st : {Stage::Planned, Stage::Interim, Stage::Adapted, Stage::Final})
    if (s == to_string(st)) return st;
  throw ValidationError("unknown lifecycle stage '" + s + "'");
}

std::vector<double> checked_p(const std::vector<double>& p, const std::string& what) {
  for (double x : p)
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(what + ": p-values must lie in [0, 1]");
  return p;
}

}  // namespace

CorrelationKnowledge parse_knowledge(const json& blocks, int k, const std::string& field) {
  if (blocks.is_null()) return CorrelationKnowledge::unknown(k);
  if (!blocks.is_array()) fail(field, "expected an array of blocks");
  std::vector<CorrelationBlock> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string f = field + "[" + std::to_string(b) + "]";
    const json& blk = blocks[b];
    const json& mem = need(blk, "members", f);
    if (!mem.is_array()) fail(f + ".members", "expected a list of 1-based indices");
    std::vector<int> order;
    for (const auto& x : mem) order.push_back(x.is_number_integer() ? x.get<int>() : 0);
    const IndexSet members = index_set(mem, k, f + ".members");
    for (std::size_t i = 1; i < order.size(); ++i)
      if (order[i] <= order[i - 1]) fail(f + ".members", "list members in ascending order");
    const std::size_t d = order.size();
    try {
      if (blk.contains("matrix")) {
        out.push_back({members, CorrelationMatrix::from_rows(d, flatten(matrix(blk["matrix"], f + ".matrix"),
                                                                          static_cast<int>(d), f + ".matrix"))});
      } else if (blk.contains("equicorrelated")) {
        out.push_back({members, CorrelationMatrix::equicorrelated(d, number(blk["equicorrelated"], f + ".equicorrelated"))});
      } else if (blk.contains("many_to_one")) {
        const json& mt = blk["many_to_one"];
        const std::vector<double> nt = numbers(need(mt, "treatment", f + ".many_to_one"), f + ".many_to_one.treatment");
        const double nc = number(need(mt, "control", f + ".many_to_one"), f + ".many_to_one.control");
        if (nt.size() != d) fail(f + ".many_to_one.treatment", "expected one size per member");
        out.push_back({members, many_to_one_correlation(nt, nc)});
      } else {
        fail(f, "needs one of matrix, equicorrelated, many_to_one");
      }
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind("field '", 0) == 0) throw;
      fail(f, msg);
    }
  }
  try {
    return CorrelationKnowledge(k, std::move(out));
  } catch (const ValidationError& e) {
    fail(field, e.what());
  }
}

WeightingGraph DesignSpec::graph() const {
  return WeightingGraph(weights, flatten(transition, size(), "graph.transition"), names);
}

CorrelationKnowledge DesignSpec::knowledge() const { return parse_knowledge(correlation, size(), "correlation"); }

ComboDesign DesignSpec::combo_design() const { return ComboDesign{graph(), knowledge(), alpha, info_fraction, nu1, nu2, {}}; }

CerDesign DesignSpec::cer_design() const { return CerDesign{graph(), knowledge(), alpha, info_fraction, {}}; }

DesignSpec parse_design(const json& doc) {
  if (!doc.is_object()) throw ValidationError("design document must be a JSON object");
  DesignSpec d;
  const std::string m = text(need(doc, "method", ""), "method");
  if (m == "CER" || m == "cer") {
    d.method = MethodTag::Cer;
  } else if (m == "Combo" || m == "combo") {
    d.method = MethodTag::Combo;
  } else {
    fail("method", "expected CER or Combo, got '" + m + "'");
  }
  const json& g = need(doc, "graph", "");
  d.weights = numbers(need(g, "weights", "graph"), "graph.weights");
  const int k = d.size();
  if (k < 1 || k > kMaxHypotheses) fail("graph.weights", "need between 1 and 16 hypotheses");
  d.transition = matrix(need(g, "transition", "graph"), "graph.transition");
  flatten(d.transition, k, "graph.transition");
  if (g.contains("names")) {
    if (!g["names"].is_array() || g["names"].size() != static_cast<std::size_t>(k)) fail("graph.names", "expected one name per hypothesis");
    for (const auto& n : g["names"]) d.names.push_back(text(n, "graph.names"));
  }
  try {
    check_graph(d.graph(), "graph");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    fail("graph", msg);
  }
  if (doc.contains("correlation")) d.correlation = doc["correlation"];
  d.knowledge();
  if (doc.contains("alpha")) d.alpha = number(doc["alpha"], "alpha");
  if (!(d.alpha > 0.0 && d.alpha < 0.5)) fail("alpha", "must lie in (0, 0.5)");
  if (doc.contains("info_fraction")) d.info_fraction = number(doc["info_fraction"], "info_fraction");
  if (!(d.info_fraction > 0.0 && d.info_fraction < 1.0)) fail("info_fraction", "must lie in (0, 1)");
  d.nu1 = std::sqrt(d.info_fraction);
  d.nu2 = std::sqrt(1.0 - d.info_fraction);
  if (doc.contains("combination_weights")) {
    const auto nu = numbers(doc["combination_weights"], "combination_weights");
    if (nu.size() != 2) fail("combination_weights", "expected [nu1, nu2]");
    if (nu[0] < 0.0 || nu[1] <= 0.0 || std::abs(nu[0] * nu[0] + nu[1] * nu[1] - 1.0) > 1e-9)
      fail("combination_weights", "need nu1^2 + nu2^2 = 1 with nu2 > 0");
    d.nu1 = nu[0];
    d.nu2 = nu[1];
  }
  return d;
}

json to_json(const DesignSpec& d) {
  json g = {{"weights", d.weights}, {"transition", d.transition}};
  if (!d.names.empty()) g["names"] = d.names;
  return json{{"method", to_string(d.method)},
              {"graph", g},
              {"correlation", d.correlation},
              {"alpha", d.alpha},
              {"info_fraction", d.info_fraction},
              {"combination_weights", {d.nu1, d.nu2}}};
}

std::string design_hash(const DesignSpec& d) {
  const std::string canon = to_json(d).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- record (de)serialization ----

namespace {

json set_json(IndexSet s) { return s.to_string(); }
IndexSet set_from(const json& v, int k, const std::string& f) { return index_set(v, k, f); }

json row_json(const PlanRow& r) {
  return {{"J", set_json(r.J)}, {"type", to_string(r.type)}, {"weights", r.weights}, {"level1", r.level1}, {"level2", r.level2}};
}
PlanRow plan_row(const json& v, int k) {
  return {set_from(need(v, "J", "plan"), k, "plan.J"), parse_type(text(need(v, "type", "plan"), "plan.type")),
          numbers(need(v, "weights", "plan"), "plan.weights"), number(need(v, "level1", "plan"), "plan.level1"),
          number(need(v, "level2", "plan"), "plan.level2")};
}

json row_json(const InterimRow& r) {
  return {{"J", set_json(r.J)}, {"type", to_string(r.type)}, {"value", r.value}, {"rejected", r.rejected}};
}
InterimRow interim_row(const json& v, int k) {
  const json& rej = need(v, "rejected", "interim.rows");
  if (!rej.is_boolean()) fail("interim.rows.rejected", "expected a boolean");
  return {set_from(need(v, "J", "interim.rows"), k, "interim.rows.J"),
          parse_type(text(need(v, "type", "interim.rows"), "interim.rows.type")),
          number(need(v, "value", "interim.rows"), "interim.rows.value"), rej.get<bool>()};
}

json row_json(const BoundaryRow& r) {
  return {{"J", set_json(r.J)}, {"group", to_string(r.group)}, {"type", to_string(r.type)}, {"B", r.B},
          {"c2", r.c2}, {"reject_outright", r.reject_outright}, {"weights", r.weights}};
}
BoundaryRow boundary_row(const json& v, int k) {
  const std::string f = "adaptation.boundaries";
  return {set_from(need(v, "J", f), k, f + ".J"),
          parse_group(text(need(v, "group", f), f + ".group")),
          parse_type(text(need(v, "type", f), f + ".type")),
          number(need(v, "B", f), f + ".B"),
          number(need(v, "c2", f), f + ".c2"),
          need(v, "reject_outright", f).get<bool>(),
          numbers(need(v, "weights", f), f + ".weights")};
}

json row_json(const AuditRow& r) {
  return {{"J", set_json(r.J)}, {"group", to_string(r.group)}, {"type", to_string(r.type)}, {"stat1", r.stat1},
          {"stat2", r.stat2}, {"combined", r.combined}, {"rejected", r.rejected}};
}
AuditRow audit_row(const json& v, int k) {
  const std::string f = "final.audit";
  return {set_from(need(v, "J", f), k, f + ".J"),
          parse_group(text(need(v, "group", f), f + ".group")),
          parse_type(text(need(v, "type", f), f + ".type")),
          number(need(v, "stat1", f), f + ".stat1"),
          number(need(v, "stat2", f), f + ".stat2"),
          number(need(v, "combined", f), f + ".combined"),
          need(v, "rejected", f).get<bool>()};
}

template <class Row>
json rows_json(const std::vector<Row>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(row_json(r));
  return a;
}

template <class F>
auto rows_from(const json& v, const std::string& field, F&& conv) {
  if (!v.is_array()) fail(field, "expected an array");
  std::vector<decltype(conv(v[0]))> out;
  for (const auto& r : v) out.push_back(conv(r));
  return out;
}

}  // namespace

json to_json(const TrialState& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["stage"] = to_string(s.stage);
  doc["design"] = to_json(s.design);
  doc["design_hash"] = s.design_hash;
  doc["plan"] = rows_json(s.plan);
  if (s.interim) {
    const auto& r = *s.interim;
    doc["interim"] = {{"design_hash", r.design_hash}, {"p1", r.p1}, {"early_rejected", set_json(r.early_rejected)},
                      {"rows", rows_json(r.rows)}};
  }
  if (s.adaptation) {
    const auto& a = *s.adaptation;
    json j = {{"design_hash", a.design_hash}, {"selected", set_json(a.selected)}, {"info_fraction", a.info_fraction},
              {"boundaries", rows_json(a.boundaries)}};
    if (a.weights) j["graph"] = {{"weights", *a.weights}, {"transition", *a.transition}};
    if (a.correlation) j["correlation"] = *a.correlation;
    doc["adaptation"] = j;
  }
  if (s.final_record) {
    const auto& f = *s.final_record;
    doc["final"] = {{"design_hash", f.design_hash},
                    {"p2", f.p2},
                    {"cumulative", f.cumulative},
                    {"stage1_rejected", set_json(f.stage1_rejected)},
                    {"stage2_rejected", set_json(f.stage2_rejected)},
                    {"rejected", set_json(f.stage1_rejected | f.stage2_rejected)},
                    {"audit", rows_json(f.audit)}};
  }
  return doc;
}

TrialState from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("state file must hold a JSON object");
  TrialState s;
  const json& ver = need(doc, "schema_version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
    fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  s.stage = parse_stage(text(need(doc, "stage", ""), "stage"));
  s.design = parse_design(need(doc, "design", ""));
  s.design_hash = text(need(doc, "design_hash", ""), "design_hash");
  const std::string h = design_hash(s.design);
  auto check_hash = [&](const std::string& got, const std::string& where) {
    if (got != h) throw ValidationError("design hash mismatch in " + where + ": the state file was altered");
  };
  check_hash(s.design_hash, "design_hash");
  const int k = s.design.size();
  s.plan = rows_from(need(doc, "plan", ""), "plan", [&](const json& v) { return plan_row(v, k); });
  if (doc.contains("interim")) {
    const json& v = doc["interim"];
    InterimRecord r;
    r.design_hash = text(need(v, "design_hash", "interim"), "interim.design_hash");
    check_hash(r.design_hash, "interim");
    r.p1 = numbers(need(v, "p1", "interim"), "interim.p1");
    r.early_rejected = set_from(need(v, "early_rejected", "interim"), k, "interim.early_rejected");
    r.rows = rows_from(need(v, "rows", "interim"), "interim.rows", [&](const json& x) { return interim_row(x, k); });
    s.interim = std::move(r);
  }
  if (doc.contains("adaptation")) {
    const json& v = doc["adaptation"];
    AdaptationRecord a;
    a.design_hash = text(need(v, "design_hash", "adaptation"), "adaptation.design_hash");
    check_hash(a.design_hash, "adaptation");
    a.selected = set_from(need(v, "selected", "adaptation"), k, "adaptation.selected");
    a.info_fraction = numbers(need(v, "info_fraction", "adaptation"), "adaptation.info_fraction");
    if (v.contains("graph")) {
      a.weights = numbers(need(v["graph"], "weights", "adaptation.graph"), "adaptation.graph.weights");
      a.transition = matrix(need(v["graph"], "transition", "adaptation.graph"), "adaptation.graph.transition");
    }
    if (v.contains("correlation")) a.correlation = v["correlation"];
    a.boundaries = rows_from(need(v, "boundaries", "adaptation"), "adaptation.boundaries",
                             [&](const json& x) { return boundary_row(x, k); });
    s.adaptation = std::move(a);
  }
  if (doc.contains("final")) {
    const json& v = doc["final"];
    FinalRecord f;
    f.design_hash = text(need(v, "design_hash", "final"), "final.design_hash");
    check_hash(f.design_hash, "final");
    f.p2 = numbers(need(v, "p2", "final"), "final.p2");
    f.cumulative = numbers(need(v, "cumulative", "final"), "final.cumulative");
    f.stage1_rejected = set_from(need(v, "stage1_rejected", "final"), k, "final.stage1_rejected");
    f.stage2_rejected = set_from(need(v, "stage2_rejected", "final"), k, "final.stage2_rejected");
    f.audit = rows_from(need(v, "audit", "final"), "final.audit", [&](const json& x) { return audit_row(x, k); });
    s.final_record = std::move(f);
  }
  const bool want_interim = s.stage != Stage::Planned;
  const bool want_adapt = s.stage == Stage::Adapted || s.stage == Stage::Final;
  const bool want_final = s.stage == Stage::Final;
  if (s.interim.has_value() != want_interim || s.adaptation.has_value() != want_adapt ||
      s.final_record.has_value() != want_final)
    throw ValidationError(std::string("state records do not match lifecycle stage '") + to_string(s.stage) + "'");
  return s;
}

TrialState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read state file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("state file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

void save_state(const TrialState& s, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write state file " + path);
    out << to_json(s).dump(2) << '\n';
    if (!out) throw ValidationError("failed writing state file " + path);
  }
  std::filesystem::rename(tmp, path);
}

// ---- workflow ----

namespace {

void require_stage(const TrialState& s, std::initializer_list<Stage> allowed, const char* command) {
  for (Stage st : allowed)
    if (s.stage == st) return;
  throw ValidationError(std::string(command) + ": state is at stage '" + to_string(s.stage) + "'");
}

}  // namespace

TrialState plan_trial(const DesignSpec& design) {
  TrialState s;
  s.design = design;
  s.design_hash = design_hash(design);
  const int k = design.size();
  if (design.method == MethodTag::Combo) {
    const ComboEngine eng(design.combo_design());
    for (IndexSet J : nonempty_subsets(IndexSet::full(k))) {
      const auto w = eng.closure().of(J);
      const SetLevels lv = eng.levels(J);
      s.plan.push_back({J, eng.partition(J).type, {w.begin(), w.end()}, lv.alpha1, lv.alpha2});
    }
  } else {
    const CerEngine eng(design.cer_design());
    for (IndexSet J : nonempty_subsets(IndexSet::full(k))) {
      const SetPlan& p = eng.plan(J);
      const auto w = eng.closure().of(J);
      s.plan.push_back({J, p.partition.type, {w.begin(), w.end()}, p.c.c1, p.c.c2});
    }
  }
  return s;
}

TrialState record_interim(const TrialState& s, const std::vector<double>& p1) {
  require_stage(s, {Stage::Planned}, "interim");
  const int k = s.design.size();
  if (static_cast<int>(p1.size()) != k)
    throw ValidationError("interim: expected " + std::to_string(k) + " stage-one p-values, got " + std::to_string(p1.size()));
  checked_p(p1, "interim");
  TrialState out = s;
  InterimRecord r;
  r.design_hash = s.design_hash;
  r.p1 = p1;
  if (s.design.method == MethodTag::Combo) {
    const ComboEngine eng(s.design.combo_design());
    const ComboInterimState st = combo_interim(eng, p1);
    for (const auto& row : st.rows) r.rows.push_back({row.J, row.type, row.p1, row.rejected});
    r.early_rejected = st.early_rejected;
  } else {
    const CerEngine eng(s.design.cer_design());
    const CerInterimState st = cer_interim(eng, p1);
    for (const auto& row : st.rows) r.rows.push_back({row.J, row.type, row.B.value_or(0.0), row.rejected});
    r.early_rejected = st.early_rejected;
  }
  out.interim = std::move(r);
  out.stage = Stage::Interim;
  return out;
}

Adaptation AdaptationRecord::to_adaptation(const DesignSpec& d) const {
  const int k = d.size();
  Adaptation a;
  a.selected = selected;
  if (weights) a.graph = WeightingGraph(*weights, flatten(*transition, k, "adaptation.graph.transition"), d.names);
  a.info_fraction = info_fraction;
  if (correlation) a.stage2_knowledge = parse_knowledge(*correlation, k, "adaptation.correlation");
  return a;
}

TrialState record_adaptation(const TrialState& s, const json& doc) {
  require_stage(s, {Stage::Interim}, "adapt");
  if (!doc.is_object()) throw ValidationError("adaptation document must be a JSON object");
  const int k = s.design.size();
  const InterimRecord& in = *s.interim;
  AdaptationRecord a;
  a.design_hash = s.design_hash;
  a.selected = index_set(need(doc, "selected", ""), k, "selected");
  std::vector<IndexSet> rejected_sets;
  for (const auto& r : in.rows)
    if (r.rejected) rejected_sets.push_back(r.J);
  try {
    partition_jplus(IndexSet::full(k), a.selected, rejected_sets);
  } catch (const ValidationError& e) {
    fail("selected", e.what());
  }

  if (doc.contains("graph")) {
    const json& g = doc["graph"];
    std::vector<double> w = numbers(need(g, "weights", "graph"), "graph.weights");
    std::vector<std::vector<double>> G = matrix(need(g, "transition", "graph"), "graph.transition");
    if (g.contains("nodes")) {
      const IndexSet nodes = index_set(g["nodes"], k, "graph.nodes");
      const std::vector<int> idx = nodes.members();
      const int n = static_cast<int>(idx.size());
      if (static_cast<int>(w.size()) != n) fail("graph.weights", "expected one weight per node");
      flatten(G, n, "graph.transition");
      std::vector<double> wf(k, 0.0);
      std::vector<std::vector<double>> Gf(k, std::vector<double>(k, 0.0));
      for (int i = 0; i < n; ++i) {
        wf[idx[i]] = w[i];
        for (int j = 0; j < n; ++j) Gf[idx[i]][idx[j]] = G[i][j];
      }
      w = std::move(wf);
      G = std::move(Gf);
    }
    if (static_cast<int>(w.size()) != k) fail("graph.weights", "expected " + std::to_string(k) + " weights or a nodes list");
    const WeightingGraph rg(w, flatten(G, k, "graph.transition"));
    check_graph(rg, "graph");
    for (int j = 0; j < k; ++j)
      if (!a.selected.contains(j) && w[j] > 0.0)
        fail("graph.weights", "positive weight on H" + std::to_string(j + 1) + ", which is not selected");
    a.weights = w;
    a.transition = G;
  }

  a.info_fraction.assign(k, s.design.info_fraction);
  if (doc.contains("info_fraction") && doc.contains("sample_sizes"))
    fail("info_fraction", "give either info_fraction or sample_sizes");
  if (doc.contains("info_fraction")) {
    const json& t = doc["info_fraction"];
    if (t.is_number()) {
      const double x = number(t, "info_fraction");
      for (int j : a.selected) a.info_fraction[j] = x;
    } else {
      a.info_fraction = numbers(t, "info_fraction");
      if (static_cast<int>(a.info_fraction.size()) != k) fail("info_fraction", "expected one value per hypothesis");
    }
  } else if (doc.contains("sample_sizes")) {
    const json& ss = doc["sample_sizes"];
    const auto s1 = numbers(need(ss, "stage1", "sample_sizes"), "sample_sizes.stage1");
    const auto s2 = numbers(need(ss, "stage2", "sample_sizes"), "sample_sizes.stage2");
    if (s1.size() != 2 || s2.size() != 2) fail("sample_sizes", "expected [treatment, control] per stage");
    const double t = adapted_information_fraction(s1[0], s1[1], s2[0], s2[1]);
    for (int j : a.selected) a.info_fraction[j] = t;
  }
  for (int j : a.selected)
    if (!(a.info_fraction[j] > 0.0 && a.info_fraction[j] < 1.0))
      fail("info_fraction", "value for H" + std::to_string(j + 1) + " must lie in (0, 1)");
  if (doc.contains("correlation")) {
    parse_knowledge(doc["correlation"], k, "correlation");
    a.correlation = doc["correlation"];
  }

  const Adaptation ad = a.to_adaptation(s.design);
  if (s.design.method == MethodTag::Cer) {
    const CerEngine eng(s.design.cer_design());
    const CerAdaptedDesign adapted(eng, ad);
    std::vector<double> z1;
    for (double p : in.p1) z1.push_back(z_from_p(p));
    for (const auto& r : in.rows) {
      if (r.rejected) continue;
      BoundaryRow b;
      b.J = r.J;
      b.group = classify(r.J, a.selected);
      b.B = r.value;
      b.weights.assign(k, 0.0);
      if (b.group != JGroup::B) {
        const AdaptedBoundary ab = adapt_boundary(r.value, adapted.partition(r.J), z1, adapted.info_fraction());
        b.type = ab.partition.type;
        b.c2 = ab.c2;
        b.reject_outright = ab.reject_outright;
        for (const auto& blk : ab.partition.blocks) {
          std::size_t m = 0;
          for (int j : blk.members) b.weights[j] = blk.weights[m++];
        }
      }
      a.boundaries.push_back(std::move(b));
    }
  } else {
    const RevisedWeights rw(s.design.graph(), ad);
    const CorrelationKnowledge k2 = ad.stage2_knowledge ? *ad.stage2_knowledge : s.design.knowledge();
    for (const auto& r : in.rows) {
      if (r.rejected) continue;
      BoundaryRow b;
      b.J = r.J;
      b.group = classify(r.J, a.selected);
      const IndexSet Jp = r.J & a.selected;
      const auto w = rw.of(Jp);
      b.weights.assign(w.begin(), w.end());
      if (!Jp.empty()) b.type = partition_weighted(k2, Jp, w).type;
      a.boundaries.push_back(std::move(b));
    }
  }
  TrialState out = s;
  out.adaptation = std::move(a);
  out.stage = Stage::Adapted;
  return out;
}

TrialState record_final(const TrialState& s, const std::vector<double>& p2_in, bool cumulative) {
  require_stage(s, {Stage::Interim, Stage::Adapted}, "final");
  const int k = s.design.size();
  TrialState cur = s;
  if (cur.stage == Stage::Interim) {
    // No adaptation recorded: continue with every open hypothesis as planned.
    cur = record_adaptation(cur, json{{"selected", (IndexSet::full(k) - cur.interim->early_rejected).to_string()}});
  }
  const AdaptationRecord& ar = *cur.adaptation;
  const IndexSet i2 = ar.selected;
  std::vector<double> p2(k, 1.0);
  if (static_cast<int>(p2_in.size()) == k) {
    for (int j : i2) p2[j] = p2_in[j];
  } else if (static_cast<int>(p2_in.size()) == i2.size()) {
    std::size_t q = 0;
    for (int j : i2) p2[j] = p2_in[q++];
  } else {
    throw ValidationError("final: expected " + std::to_string(k) + " stage-two p-values or one per selected hypothesis (" +
                          std::to_string(i2.size()) + "), got " + std::to_string(p2_in.size()));
  }
  checked_p(p2, "final");
  const Adaptation ad = ar.to_adaptation(s.design);
  const std::vector<double>& p1 = cur.interim->p1;
  FinalRecord f;
  f.design_hash = s.design_hash;
  f.p2 = p2;
  if (s.design.method == MethodTag::Cer) {
    const CerEngine eng(s.design.cer_design());
    const CerInterimState st = cer_interim(eng, p1);
    f.cumulative.assign(k, 1.0);
    for (int j : i2) f.cumulative[j] = cumulative ? p2[j] : adapted_cumulative_p(p1[j], p2[j], ar.info_fraction[j]);
    const CerDecision dec = cer_final(eng, st, ad, f.cumulative);
    for (const auto& a : dec.audit) f.audit.push_back({a.J, a.group, a.type, a.B, a.c2, 1.0, a.rejected});
    f.stage1_rejected = dec.stage1_rejected;
    f.stage2_rejected = dec.stage2_rejected;
  } else {
    if (cumulative) throw ValidationError("final: the combination method takes incremental stage-two p-values");
    const ComboEngine eng(s.design.combo_design());
    const ComboInterimState st = combo_interim(eng, p1);
    const ComboDecision dec = combo_final(eng, st, ad, p2);
    for (const auto& a : dec.audit)
      f.audit.push_back({a.J, a.group, a.group == JGroup::Rejected ? a.type1 : a.type2, a.p1, a.p2, a.combined, a.rejected});
    f.stage1_rejected = dec.stage1_rejected;
    f.stage2_rejected = dec.stage2_rejected;
  }
  cur.final_record = std::move(f);
  cur.stage = Stage::Final;
  return cur;
}

}  // namespace adaptmt::state
