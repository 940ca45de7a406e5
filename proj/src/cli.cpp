#include "adaptmt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "adaptmt/error.hpp"
#include "adaptmt/state.hpp"

namespace adaptmt::cli {

using nlohmann::json;

namespace {

std::string fmt(double x, int sig = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Weights of the members of J only, as "{0.5, 0.5, 0}".
std::string member_list(const std::vector<double>& v, IndexSet J, double scale = 1.0, int sig = 4) {
  std::string s = "{";
  bool first = true;
  for (int j : J) {
    if (!first) s += ", ";
    first = false;
    s += fmt(v[j] * scale, sig);
  }
  return s + "}";
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out, bool csv) const {
    if (csv) {
      auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          if (i) out << ',';
          const bool quote = r[i].find_first_of(",\"") != std::string::npos;
          if (quote) {
            out << '"';
            for (char c : r[i]) out << (c == '"' ? "\"\"" : std::string(1, c));
            out << '"';
          } else {
            out << r[i];
          }
        }
        out << '\n';
      };
      line(header_);
      for (const auto& r : rows_) line(r);
      return;
    }
    std::vector<std::size_t> width(header_.size());
    for (std::size_t i = 0; i < header_.size(); ++i) width[i] = header_[i].size();
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << std::left << std::setw(static_cast<int>(width[i]) + 2) << r[i];
      out << '\n';
    };
    line(header_);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out << std::string(total, '-') << '\n';
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + " is not valid JSON: " + e.what());
  }
}

// Sends a report to --out when given, else to stdout.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  write(f);
}

std::string hyp(int j) { return "H" + std::to_string(j + 1); }

void report_plan(std::ostream& out, const state::TrialState& s, bool csv) {
  const bool cer = s.design.method == state::MethodTag::Cer;
  if (!csv) {
    out << "Method " << state::to_string(s.design.method) << ", alpha " << fmt(s.design.alpha) << ", information fraction "
        << fmt(s.design.info_fraction) << ", design " << s.design_hash << "\n";
  }
  if (cer) {
    Table t({"J", "weights", "c1", "c2", "stage1_thresholds", "stage2_thresholds", "type"});
    for (const auto& r : s.plan)
      t.add({r.J.to_string(), member_list(r.weights, r.J), fmt(r.level1, 4), fmt(r.level2, 5),
             member_list(r.weights, r.J, r.level1, 3), member_list(r.weights, r.J, r.level2, 3), to_string(r.type)});
    t.print(out, csv);
  } else {
    Table t({"J", "weights", "alpha1", "alpha2", "type"});
    for (const auto& r : s.plan)
      t.add({r.J.to_string(), member_list(r.weights, r.J), fmt(r.level1, 4), fmt(r.level2, 4), to_string(r.type)});
    t.print(out, csv);
  }
}

void report_interim(std::ostream& out, const state::TrialState& s, bool csv) {
  const auto& in = *s.interim;
  const bool cer = s.design.method == state::MethodTag::Cer;
  if (!csv) {
    out << "Rejected at stage one: " << (in.early_rejected.empty() ? std::string("none") : in.early_rejected.to_string())
        << "\n";
  }
  if (cer) {
    Table t({"J", "weights", "status", "B_J"});
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
      const auto& r = in.rows[i];
      t.add({r.J.to_string(), member_list(s.plan[i].weights, r.J), r.rejected ? "rejected" : "open",
             r.rejected ? "" : fixed(r.value, 4)});
    }
    t.print(out, csv);
  } else {
    Table t({"J", "type", "p_J1", "status"});
    for (const auto& r : in.rows)
      t.add({r.J.to_string(), to_string(r.type), fmt(r.value, 4), r.rejected ? "rejected" : "open"});
    t.print(out, csv);
  }
}

void report_adaptation(std::ostream& out, const state::TrialState& s, bool csv) {
  const auto& a = *s.adaptation;
  const bool cer = s.design.method == state::MethodTag::Cer;
  if (!csv) {
    out << "Selected for stage two: " << a.selected.to_string() << "\n";
    out << "Adapted information fraction:";
    for (int j : a.selected) out << ' ' << hyp(j) << '=' << fixed(a.info_fraction[j], 4);
    out << "\n";
  }
  if (cer) {
    Table t({"J", "group", "J_and_I2", "weights", "type", "B_J", "c2", "thresholds"});
    for (const auto& b : a.boundaries) {
      const IndexSet Jp = b.J & a.selected;
      std::string thr;
      if (b.group == JGroup::B) {
        thr = "never rejected";
      } else if (b.reject_outright) {
        thr = "rejected (B_J >= 1)";
      } else {
        thr = member_list(b.weights, Jp, b.c2, 3);
      }
      t.add({b.J.to_string(), to_string(b.group), Jp.empty() ? "{}" : Jp.to_string(), Jp.empty() ? "" : member_list(b.weights, Jp),
             b.group == JGroup::B ? "" : to_string(b.type), fixed(b.B, 4), b.group == JGroup::B ? "" : fmt(b.c2, 4), thr});
    }
    t.print(out, csv);
  } else {
    Table t({"J", "group", "J_and_I2", "stage2_weights", "type"});
    for (const auto& b : a.boundaries) {
      const IndexSet Jp = b.J & a.selected;
      t.add({b.J.to_string(), to_string(b.group), Jp.empty() ? "{}" : Jp.to_string(), Jp.empty() ? "" : member_list(b.weights, Jp),
             Jp.empty() ? "" : to_string(b.type)});
    }
    t.print(out, csv);
  }
}

void report_final(std::ostream& out, const state::TrialState& s, bool csv) {
  const auto& f = *s.final_record;
  const bool cer = s.design.method == state::MethodTag::Cer;
  const int k = s.design.size();
  if (cer) {
    Table t({"J", "group", "type", "B_J", "c2", "thresholds", "decision"});
    const auto& a = *s.adaptation;
    for (const auto& r : f.audit) {
      std::string thr;
      if (r.group == JGroup::A || r.group == JGroup::C) {
        for (const auto& b : a.boundaries)
          if (b.J == r.J) thr = member_list(b.weights, r.J & a.selected, r.stat2, 3);
      }
      t.add({r.J.to_string(), to_string(r.group), to_string(r.type), r.group == JGroup::Rejected ? "" : fixed(r.stat1, 4),
             r.group == JGroup::Rejected || r.group == JGroup::B ? "" : fmt(r.stat2, 4), thr,
             r.rejected ? "reject" : "retain"});
    }
    t.print(out, csv);
  } else {
    Table t({"J", "group", "type", "p_J1", "p_J2", "combined", "decision"});
    for (const auto& r : f.audit)
      t.add({r.J.to_string(), to_string(r.group), to_string(r.type), fmt(r.stat1, 4),
             r.group == JGroup::Rejected ? "" : fmt(r.stat2, 4), r.group == JGroup::Rejected ? "" : fmt(r.combined, 4),
             r.rejected ? "reject" : "retain"});
    t.print(out, csv);
  }
  if (!csv) {
    out << "\n";
    for (int j = 0; j < k; ++j) {
      out << hyp(j) << ": ";
      if (f.stage1_rejected.contains(j)) {
        out << "rejected at stage one";
      } else if (f.stage2_rejected.contains(j)) {
        out << "rejected at stage two";
        if (cer) out << " (cumulative p " << fmt(f.cumulative[j], 4) << ")";
      } else {
        out << "not rejected";
      }
      out << "\n";
    }
  }
}

std::string opt_pct(const std::optional<sim::Estimate>& e, int digits = 2) {
  return e ? fixed(100.0 * e->value, digits) : std::string("n/a");
}

}  // namespace

SimulationPlan parse_simulation(const json& doc, double scale) {
  if (!doc.is_object()) throw ValidationError("simulation document must be a JSON object");
  auto num = [&](const char* key, double dflt) {
    if (!doc.contains(key)) return dflt;
    if (!doc[key].is_number()) throw ValidationError(std::string("field '") + key + "': expected a number");
    return doc[key].get<double>();
  };
  auto count = [&](const char* key, double dflt) -> std::int64_t {
    const double v = num(key, dflt);
    if (!(v >= 0.0) || v != std::floor(v)) throw ValidationError(std::string("field '") + key + "': expected a non-negative integer");
    if (v == 0.0) return 0;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v * scale)));
  };
  SimulationPlan plan;
  if (doc.contains("layout")) {
    const std::string l = doc["layout"].is_string() ? doc["layout"].get<std::string>() : "";
    if (l == "fwer") {
      plan.layout = Layout::Fwer;
    } else if (l == "power") {
      plan.layout = Layout::Power;
    } else {
      throw ValidationError("field 'layout': expected \"fwer\" or \"power\"");
    }
  }
  sim::SimulationConfig base;
  base.n_per_arm = static_cast<int>(num("n_per_arm", 100));
  base.interim_fraction = num("interim_fraction", 0.5);
  base.alpha = num("alpha", 0.025);
  base.seed = static_cast<std::uint64_t>(num("seed", 20240601));
  base.threads = static_cast<int>(num("threads", 1));
  base.combo_replicates = count("combo_replicates", 20000);
  base.cer_stage1_replicates = count("cer_stage1_replicates", 4000);
  base.cer_stage2_replicates = static_cast<int>(num("cer_stage2_replicates", 50));
  if (doc.contains("methods")) {
    if (!doc["methods"].is_array()) throw ValidationError("field 'methods': expected a list");
    base.methods.clear();
    for (const auto& m : doc["methods"]) {
      if (!m.is_string()) throw ValidationError("field 'methods': expected strings");
      base.methods.push_back(sim::parse_method(m.get<std::string>()));
    }
  }
  if (doc.contains("all_dropped")) {
    const std::string p = doc["all_dropped"].is_string() ? doc["all_dropped"].get<std::string>() : "";
    if (p == "retain_best") {
      base.all_dropped = sim::AllDroppedPolicy::RetainBest;
    } else if (p == "stop") {
      base.all_dropped = sim::AllDroppedPolicy::StopTrial;
    } else {
      throw ValidationError("field 'all_dropped': expected \"retain_best\" or \"stop\"");
    }
  }
  const double sigma = num("sigma", 1.0);

  if (!doc.contains("scenarios") || !doc["scenarios"].is_array() || doc["scenarios"].empty())
    throw ValidationError("field 'scenarios': expected a non-empty list");
  std::vector<sim::Scenario> scenarios;
  for (std::size_t i = 0; i < doc["scenarios"].size(); ++i) {
    const json& s = doc["scenarios"][i];
    const std::string f = "scenarios[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("effects") || !s["effects"].is_array())
      throw ValidationError("field '" + f + ".effects': expected a list of effect sizes");
    sim::Scenario sc;
    sc.label = s.contains("label") && s["label"].is_string() ? s["label"].get<std::string>() : "S" + std::to_string(i + 1);
    for (const auto& e : s["effects"]) {
      if (!e.is_number()) throw ValidationError("field '" + f + ".effects': expected numbers");
      sc.effects.push_back(e.get<double>());
    }
    sc.sigma = sigma;
    scenarios.push_back(std::move(sc));
  }
  std::vector<sim::DroppingRule> rules;
  if (!doc.contains("rules")) {
    rules = {sim::DroppingRule::Conservative};
  } else {
    const json& r = doc["rules"];
    if (r.is_string()) {
      rules.push_back(sim::parse_dropping_rule(r.get<std::string>()));
    } else if (r.is_array()) {
      for (const auto& x : r) {
        if (!x.is_string()) throw ValidationError("field 'rules': expected rule names");
        rules.push_back(sim::parse_dropping_rule(x.get<std::string>()));
      }
    } else {
      throw ValidationError("field 'rules': expected a rule name or a list");
    }
  }
  std::vector<double> rhos;
  if (!doc.contains("rho")) {
    rhos = {0.5};
  } else if (doc["rho"].is_number()) {
    rhos = {doc["rho"].get<double>()};
  } else if (doc["rho"].is_array()) {
    for (const auto& x : doc["rho"]) {
      if (!x.is_number()) throw ValidationError("field 'rho': expected numbers");
      rhos.push_back(x.get<double>());
    }
  } else {
    throw ValidationError("field 'rho': expected a number or a list");
  }
  for (const auto& sc : scenarios)
    for (double rho : rhos)
      for (auto rule : rules) {
        sim::SimulationConfig c = base;
        c.scenario = sc;
        c.scenario.rho = rho;
        c.rule = rule;
        c.validate();
        plan.cells.push_back(std::move(c));
      }
  return plan;
}

void print_simulation_table(std::ostream& out, Layout layout, const std::vector<sim::PowerReport>& reports) {
  if (layout == Layout::Fwer) {
    // Rows: scenario x rho x method; columns: rules in first-seen order.
    std::vector<sim::DroppingRule> rules;
    std::vector<std::tuple<std::string, double, sim::Method>> rows;
    std::map<std::tuple<std::string, double, int, int>, std::optional<sim::Estimate>> cell;
    for (const auto& r : reports) {
      if (std::find(rules.begin(), rules.end(), r.rule) == rules.end()) rules.push_back(r.rule);
      const auto key = std::make_tuple(r.scenario, r.rho, r.method);
      if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
      cell[{r.scenario, r.rho, static_cast<int>(r.method), static_cast<int>(r.rule)}] = r.fwer;
    }
    std::vector<std::string> header{"Scenario", "Correlation", "Method"};
    for (auto rule : rules) header.push_back(std::string(sim::to_string(rule)) + " FWER% (SE)");
    Table t(header);
    for (const auto& [sc, rho, m] : rows) {
      std::vector<std::string> row{sc, fmt(rho, 3), sim::to_string(m)};
      for (auto rule : rules) {
        auto it = cell.find({sc, rho, static_cast<int>(m), static_cast<int>(rule)});
        if (it == cell.end() || !it->second) {
          row.push_back("n/a");
        } else {
          row.push_back(fixed(100.0 * it->second->value, 2) + " (" + fixed(100.0 * it->second->se, 2) + ")");
        }
      }
      t.add(row);
    }
    t.print(out, false);
    return;
  }
  Table t({"Scenario", "Rule", "Method", "Disjunctive%", "Conjunctive%", "FWER%", "Disj SE", "Conj SE"});
  for (const auto& r : reports)
    t.add({r.scenario, sim::to_string(r.rule), sim::to_string(r.method), opt_pct(r.disjunctive, 1), opt_pct(r.conjunctive, 1),
           opt_pct(r.fwer, 2), r.disjunctive ? fixed(100.0 * r.disjunctive->se, 2) : "n/a",
           r.conjunctive ? fixed(100.0 * r.conjunctive->se, 2) : "n/a"});
  t.print(out, false);
}

namespace {

json reports_json(const std::vector<sim::PowerReport>& reports) {
  json a = json::array();
  auto est = [](const std::optional<sim::Estimate>& e) -> json {
    if (!e) return nullptr;
    return {{"value", e->value}, {"se", e->se}};
  };
  for (const auto& r : reports) {
    json rates = json::array();
    for (const auto& e : r.rejection_rate) rates.push_back({{"value", e.value}, {"se", e.se}});
    a.push_back({{"scenario", r.scenario},
                 {"rule", sim::to_string(r.rule)},
                 {"rho", r.rho},
                 {"method", sim::to_string(r.method)},
                 {"clusters", r.clusters},
                 {"draws", r.draws},
                 {"disjunctive", est(r.disjunctive)},
                 {"conjunctive", est(r.conjunctive)},
                 {"fwer", est(r.fwer)},
                 {"rejection_rate", rates}});
  }
  return a;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive graph-based closed testing for two-stage trials"};
  app.name("adaptmt");
  app.require_subcommand(1);

  std::string config, state_path, out_path, format = "table";
  std::vector<double> pvals;
  bool cumulative = false;
  std::uint64_t seed = 0;
  int threads = 0;
  double scale = 1.0;

  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "table"}));
  };
  auto* c_validate = app.add_subcommand("validate", "Check a design or simulation document");
  c_validate->add_option("--config", config, "Design or simulation document (JSON)")->required();
  auto* c_weights = app.add_subcommand("weights", "Closure weights of the design graph");
  c_weights->add_option("--config", config, "Design document (JSON)")->required();
  c_weights->add_option("--out", out_path, "Write the table here instead of stdout");
  add_format(c_weights);
  auto* c_plan = app.add_subcommand("plan", "Plan boundaries and write a new state file");
  c_plan->add_option("--config", config, "Design document (JSON)")->required();
  c_plan->add_option("--state", state_path, "State file to create")->required();
  c_plan->add_option("--out", out_path, "Write the report here instead of stdout");
  add_format(c_plan);
  auto* c_interim = app.add_subcommand("interim", "Record stage-one p-values");
  c_interim->add_option("--state", state_path, "State file")->required();
  c_interim->add_option("--p", pvals, "Stage-one p-values, comma separated")->required()->delimiter(',');
  c_interim->add_option("--out", out_path, "Write the report here instead of stdout");
  add_format(c_interim);
  auto* c_adapt = app.add_subcommand("adapt", "Record the interim adaptation");
  c_adapt->add_option("--state", state_path, "State file")->required();
  c_adapt->add_option("--config", config, "Adaptation document (JSON)")->required();
  c_adapt->add_option("--out", out_path, "Write the report here instead of stdout");
  add_format(c_adapt);
  auto* c_final = app.add_subcommand("final", "Record stage-two p-values and decide");
  c_final->add_option("--state", state_path, "State file")->required();
  c_final->add_option("--p", pvals, "Stage-two incremental p-values (all hypotheses or the selected ones)")
      ->required()
      ->delimiter(',');
  c_final->add_flag("--cumulative", cumulative, "CER only: the p-values are already cumulative");
  c_final->add_option("--out", out_path, "Write the report here instead of stdout");
  add_format(c_final);
  auto* c_sim = app.add_subcommand("simulate", "Run a simulation study");
  c_sim->add_option("--config", config, "Simulation document (JSON)")->required();
  c_sim->add_option("--out", out_path, "Output prefix; writes PREFIX.csv and PREFIX.json");
  c_sim->add_option("--seed", seed, "Override the seed");
  c_sim->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  c_sim->add_option("--scale", scale, "Multiply replicate counts")->check(CLI::PositiveNumber);
  add_format(c_sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const bool csv = format == "csv";

  try {
    if (*c_validate) {
      const json doc = read_json(config);
      if (doc.is_object() && doc.contains("scenarios")) {
        const SimulationPlan plan = parse_simulation(doc, 1.0);
        out << "ok: simulation with " << plan.cells.size() << " cells\n";
        return 0;
      }
      const state::DesignSpec d = state::parse_design(doc);
      const ValidationReport rep = validate_graph(d.graph());
      for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
      out << "ok: " << d.size() << " hypotheses, method " << state::to_string(d.method) << ", design "
          << state::design_hash(d) << "\n";
      return 0;
    }
    if (*c_weights) {
      json doc = read_json(config);
      if (!doc.contains("method")) doc["method"] = "CER";
      const state::DesignSpec d = state::parse_design(doc);
      const ClosureWeights cw = closure_weights(d.graph());
      emit(out_path, out, [&](std::ostream& o) {
        std::vector<std::string> header{"J"};
        for (int j = 0; j < d.size(); ++j) header.push_back(d.names.empty() ? hyp(j) : d.names[j]);
        Table t(header);
        for (IndexSet J : nonempty_subsets(IndexSet::full(d.size()))) {
          std::vector<std::string> row{J.to_string()};
          for (int j = 0; j < d.size(); ++j) row.push_back(J.contains(j) ? fmt(cw.weight(J, j), 6) : "");
          t.add(row);
        }
        t.print(o, csv);
      });
      return 0;
    }
    if (*c_plan) {
      const state::TrialState s = state::plan_trial(state::parse_design(read_json(config)));
      state::save_state(s, state_path);
      emit(out_path, out, [&](std::ostream& o) { report_plan(o, s, csv); });
      return 0;
    }
    if (*c_interim) {
      const state::TrialState s = state::record_interim(state::load_state(state_path), pvals);
      state::save_state(s, state_path);
      emit(out_path, out, [&](std::ostream& o) { report_interim(o, s, csv); });
      return 0;
    }
    if (*c_adapt) {
      const state::TrialState s = state::record_adaptation(state::load_state(state_path), read_json(config));
      state::save_state(s, state_path);
      emit(out_path, out, [&](std::ostream& o) { report_adaptation(o, s, csv); });
      return 0;
    }
    if (*c_final) {
      const state::TrialState s = state::record_final(state::load_state(state_path), pvals, cumulative);
      state::save_state(s, state_path);
      emit(out_path, out, [&](std::ostream& o) { report_final(o, s, csv); });
      return 0;
    }
    if (*c_sim) {
      SimulationPlan plan = parse_simulation(read_json(config), scale);
      std::vector<sim::PowerReport> reports;
      std::map<int, std::unique_ptr<sim::StudyDesign>> designs;
      for (auto& cell : plan.cells) {
        if (c_sim->count("--seed")) cell.seed = seed;
        if (threads > 0) cell.threads = threads;
        auto& d = designs[cell.scenario.arms()];
        if (!d || !d->matches(cell))
          d = std::make_unique<sim::StudyDesign>(cell.scenario.arms(), cell.n_per_arm, cell.interim_fraction, cell.alpha);
        auto r = sim::run_study(cell, d.get());
        reports.insert(reports.end(), r.begin(), r.end());
      }
      if (!out_path.empty()) {
        std::ofstream c(out_path + ".csv");
        if (!c) throw ValidationError("cannot write " + out_path + ".csv");
        sim::write_power_csv(c, reports);
        std::ofstream j(out_path + ".json");
        if (!j) throw ValidationError("cannot write " + out_path + ".json");
        j << json{{"reports", reports_json(reports)}}.dump(2) << '\n';
      }
      if (csv) {
        sim::write_power_csv(out, reports);
      } else {
        print_simulation_table(out, plan.layout, reports);
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace adaptmt::cli
