// One PASS/FAIL line per acceptance criterion. Simulation sizes are fixed
// with fixed seeds so reruns reproduce the same numbers.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "../property/properties.hpp"
#include "adaptmt/cer.hpp"
#include "adaptmt/combo.hpp"
#include "adaptmt/graph.hpp"
#include "adaptmt/normal.hpp"
#include "adaptmt/sim.hpp"
#include "fixtures.hpp"

using namespace adaptmt;
using props::fmt;
using props::Outcome;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed checks with a short label; the first few go into the detail.
struct Checks {
  int total = 0;
  std::vector<std::string> failed;
  void operator()(bool ok, const std::string& what) {
    ++total;
    if (!ok) failed.push_back(what);
  }
  bool near(double got, double want, double tol, const std::string& what) {
    const bool ok = std::abs(got - want) <= tol;
    (*this)(ok, fmt("%s got %.6g want %.6g", what.c_str(), got, want));
    return ok;
  }
  std::string summary() const {
    std::string s = fmt("%d/%d checks", total - static_cast<int>(failed.size()), total);
    for (std::size_t i = 0; i < failed.size() && i < 3; ++i) s += "; " + failed[i];
    return s;
  }
};

// ---- combination method worked example ------------------------------------

Outcome combo_example() {
  Outcome o{"worked example, combination method"};
  const auto t0 = Clock::now();
  Checks c;
  const ComboEngine e(ComboDesign{fixtures::schizophrenia_graph(), fixtures::schizophrenia_knowledge()});
  c.near(e.common_levels().alpha1, 0.001525, 1e-5, "alpha1");
  c.near(e.common_levels().alpha2, 0.0245, 5e-4, "alpha2");

  const auto st = combo_interim(e, fixtures::schizophrenia_p1());
  struct Row1 {
    IndexSet J;
    double p;
    TestType type;
  };
  const auto P = TestType::Parametric, N = TestType::Nonparametric, NA = TestType::NA;
  const std::vector<Row1> table3 = {
      {IndexSet::of1({1, 2, 3, 4}), 0.00088, P}, {IndexSet::of1({2, 3, 4}), 0.0900, N}, {IndexSet::of1({1, 3, 4}), 0.0006, N},
      {IndexSet::of1({1, 2, 4}), 0.00088, P}, {IndexSet::of1({1, 2, 3}), 0.00088, P}, {IndexSet::of1({3, 4}), 0.0410, P},
      {IndexSet::of1({2, 4}), 0.0952, NA}, {IndexSet::of1({2, 3}), 0.0900, N}, {IndexSet::of1({1, 4}), 0.0006, N},
      {IndexSet::of1({1, 3}), 0.00045, NA}, {IndexSet::of1({1, 2}), 0.00088, P}, {IndexSet::of1({4}), 0.1104, NA},
      {IndexSet::of1({3}), 0.0225, NA}, {IndexSet::of1({2}), 0.0952, NA}, {IndexSet::of1({1}), 0.00045, NA},
  };
  for (const auto& r : table3) {
    const IndexSet J = r.J;
    const auto& row = st.row(J);
    c.near(row.p1, r.p, 1e-4, "stage-one p " + J.to_string());
    c(row.type == r.type, "stage-one method " + J.to_string());
  }
  c(st.early_rejected == IndexSet::of1({1}), "H1 rejected at stage one");

  Adaptation a;
  a.selected = IndexSet::of1({2, 3, 4});
  const std::vector<double> p2{1.0, 0.1121, 0.0112, 0.1153};
  const auto d = combo_final(e, st, a, p2);
  struct Row2 {
    IndexSet J;
    double p1, p2, combined;
    TestType type2;
  };
  const std::vector<Row2> table45 = {
      {IndexSet::of1({2, 3, 4}), 0.0900, 0.0448, 0.0158, N}, {IndexSet::of1({3, 4}), 0.0410, 0.0209, 0.0038, P},
      {IndexSet::of1({2, 4}), 0.0952, 0.1121, 0.0371, NA},   {IndexSet::of1({2, 3}), 0.0900, 0.0448, 0.0158, N},
      {IndexSet::of1({4}), 0.1104, 0.1153, 0.0433, NA},      {IndexSet::of1({3}), 0.0225, 0.0112, 0.0012, NA},
      {IndexSet::of1({2}), 0.0952, 0.1121, 0.0371, NA},
  };
  for (const auto& r : table45) {
    const auto it = std::find_if(d.audit.begin(), d.audit.end(), [&](const auto& x) { return x.J == r.J; });
    if (it == d.audit.end()) {
      c(false, "missing audit row " + r.J.to_string());
      continue;
    }
    const std::string j = r.J.to_string();
    c.near(it->p1, r.p1, 1e-4, "p1 " + j);
    c.near(it->p2, r.p2, 1e-4, "p2 " + j);
    c.near(it->combined, r.combined, 1e-4, "combined " + j);
    // Independent recomputation of the inverse normal combination.
    const double nu = std::sqrt(0.5);
    const double comb = std_normal_sf(nu * std_normal_quantile_upper(it->p1) + nu * std_normal_quantile_upper(it->p2));
    c.near(it->combined, comb, 1e-12, "combination " + j);
    c(it->type2 == r.type2, "stage-two method " + j);
  }
  c(d.stage1_rejected == IndexSet::of1({1}), "stage-one decision");
  c(d.stage2_rejected == IndexSet::of1({3}), "stage-two decision");
  const double secs = seconds_since(t0);
  c(secs < 1.0, fmt("runtime %.2fs", secs));
  o.pass = c.failed.empty();
  o.detail = c.summary() + fmt(", %.3fs", secs);
  return o;
}

// ---- conditional error worked example -------------------------------------

// Stratified estimate of P(sqrt(t) z1 + sqrt(1-t) Z >= z(q)).
double stratified_tail(double z1, double t, double q, long n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double bound = std_normal_quantile_upper(q);
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const double z = std_normal_quantile((static_cast<double>(i) + u(rng)) / static_cast<double>(n));
    hits += std::sqrt(t) * z1 + std::sqrt(1.0 - t) * z >= bound;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

Outcome cer_example() {
  Outcome o{"worked example, conditional error method"};
  const auto t0 = Clock::now();
  Checks c;
  const CerEngine e(CerDesign{fixtures::schizophrenia_graph(), fixtures::schizophrenia_knowledge()});

  // Planned thresholds of the positive-weight members, largest first.
  const std::vector<double> par1{0.000782, 0.000782}, par2{0.0132, 0.0132};
  const std::vector<double> np1{0.00114, 0.000381}, np2{0.0183, 0.00610};
  const std::vector<double> one1{0.001525}, one2{0.0245};
  struct Row {
    IndexSet J;
    const std::vector<double>& s1;
    const std::vector<double>& s2;
  };
  const std::vector<Row> table7 = {
      {IndexSet::of1({1, 2, 3, 4}), par1, par2}, {IndexSet::of1({2, 3, 4}), np1, np2}, {IndexSet::of1({1, 3, 4}), np1, np2},
      {IndexSet::of1({1, 2, 4}), par1, par2},    {IndexSet::of1({1, 2, 3}), par1, par2}, {IndexSet::of1({3, 4}), par1, par2},
      {IndexSet::of1({2, 4}), one1, one2},       {IndexSet::of1({2, 3}), np1, np2},      {IndexSet::of1({1, 4}), np1, np2},
      {IndexSet::of1({1, 3}), one1, one2},       {IndexSet::of1({1, 2}), par1, par2},    {IndexSet::of1({4}), one1, one2},
      {IndexSet::of1({3}), one1, one2},          {IndexSet::of1({2}), one1, one2},       {IndexSet::of1({1}), one1, one2},
  };
  for (const auto& r : table7) {
    const SetPlan& p = e.plan(r.J);
    std::vector<double> w;
    for (const auto& b : p.partition.blocks)
      for (double x : b.weights) w.push_back(x);
    std::sort(w.begin(), w.end(), std::greater<>());
    if (w.size() != r.s1.size()) {
      c(false, "member count " + r.J.to_string());
      continue;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      c.near(w[i] * p.c.c1, r.s1[i], 1e-4, "stage-one threshold " + r.J.to_string());
      c.near(w[i] * p.c.c2, r.s2[i], 1e-4, "stage-two threshold " + r.J.to_string());
    }
  }
  c.near(e.plan(IndexSet::full(4)).c.c1, 0.001564, 1e-4, "c1 full set");
  c.near(e.plan(IndexSet::full(4)).c.c2, 0.02633, 1e-4, "c2 full set");
  c.near(e.plan(IndexSet::of1({2, 3, 4})).c.c1, 0.001525, 1e-4, "c1 {2,3,4}");
  c.near(e.plan(IndexSet::of1({2, 3, 4})).c.c2, 0.024409, 1e-4, "c2 {2,3,4}");

  const auto st = cer_interim(e, fixtures::schizophrenia_p1());
  c(st.early_rejected == IndexSet::of1({1}), "H1 rejected at stage one");
  const std::vector<std::pair<IndexSet, double>> table8 = {
      {IndexSet::of1({2, 3, 4}), 0.1117}, {IndexSet::of1({3, 4}), 0.1420}, {IndexSet::of1({2, 4}), 0.0702},
      {IndexSet::of1({2, 3}), 0.1117},    {IndexSet::of1({4}), 0.0594},    {IndexSet::of1({3}), 0.2179},
      {IndexSet::of1({2}), 0.0702}};
  for (const auto& [J, B] : table8) {
    const auto& row = st.row(J);
    c(row.B.has_value(), "B present " + J.to_string());
    if (row.B) c.near(*row.B, B, 1e-3, "B " + J.to_string());
  }

  const double t = adapted_information_fraction(35, 35, 52, 53);
  c.near(t, 0.4, 1e-3, "adapted information fraction");
  const double cum2 = adapted_cumulative_p(0.0952, 0.0299, t);
  const double cum4 = adapted_cumulative_p(0.1104, 0.0586, t);
  c.near(cum2, 0.0111, 5e-4, "cumulative p H2");
  c.near(cum4, 0.0234, 5e-4, "cumulative p H4");

  std::vector<double> G(16, 0.0);
  G[1 * 4 + 3] = 1.0;
  G[3 * 4 + 1] = 1.0;
  Adaptation a;
  a.selected = IndexSet::of1({2, 4});
  a.graph = WeightingGraph({0.0, 0.5, 0.0, 0.5}, G);
  a.info_fraction.assign(4, t);
  const auto d = cer_final(e, st, a, std::vector<double>{1.0, cum2, 1.0, cum4});
  c(d.stage1_rejected == IndexSet::of1({1}), "stage-one decision");
  c(d.stage2_rejected == IndexSet::of1({2, 4}), "stage-two decision");
  const double engine_secs = seconds_since(t0);

  // Adapted boundaries must spend exactly B under the conditional law; the
  // oracle simulates that law directly with 1e7 draws per set.
  std::mt19937_64 rng(12);
  const long draws = 10'000'000;
  int checked = 0;
  double worst = 0.0;
  for (const auto& r : d.audit) {
    if (r.group != JGroup::A && r.group != JGroup::C) continue;
    std::vector<int> live;
    for (int j : r.J & a.selected)
      if (r.thresholds[j] > 0.0) live.push_back(j);
    double mc = 0.0;
    for (int j : live) mc += stratified_tail(st.z1[j], t, r.thresholds[j], draws / static_cast<long>(live.size()), rng);
    worst = std::max(worst, std::abs(mc - *st.row(r.J).B));
    c.near(mc, *st.row(r.J).B, 1e-4, "oracle residual " + r.J.to_string());
    ++checked;
  }
  c(checked == 6, fmt("%d adapted sets checked", checked));
  const double secs = seconds_since(t0);
  c(engine_secs < 10.0, fmt("runtime %.2fs", engine_secs));
  o.pass = c.failed.empty();
  o.detail = c.summary() + fmt(", oracle residual %.1e over %d sets, engine %.3fs, with oracle %.1fs", worst, checked,
                               engine_secs, secs);
  return o;
}

// ---- closure weights ------------------------------------------------------

Outcome closure_golden() {
  Outcome o{"closure weights, printed table and eight-hypothesis graph"};
  Checks c;
  const ClosureWeights cw = closure_weights(fixtures::schizophrenia_graph());
  const std::vector<std::pair<IndexSet, std::vector<double>>> table2 = {
      {IndexSet::of1({1, 2, 3, 4}), {0.5, 0.5, 0, 0}}, {IndexSet::of1({2, 3, 4}), {0.75, 0.25, 0}},
      {IndexSet::of1({1, 3, 4}), {0.75, 0, 0.25}},     {IndexSet::of1({1, 2, 4}), {0.5, 0.5, 0}},
      {IndexSet::of1({1, 2, 3}), {0.5, 0.5, 0}},       {IndexSet::of1({3, 4}), {0.5, 0.5}},
      {IndexSet::of1({2, 4}), {1, 0}},                 {IndexSet::of1({2, 3}), {0.75, 0.25}},
      {IndexSet::of1({1, 4}), {0.75, 0.25}},           {IndexSet::of1({1, 3}), {1, 0}},
      {IndexSet::of1({1, 2}), {0.5, 0.5}},             {IndexSet::of1({4}), {1}},
      {IndexSet::of1({3}), {1}},                       {IndexSet::of1({2}), {1}},
      {IndexSet::of1({1}), {1}},
  };
  int entries = 0;
  for (const auto& [J, w] : table2) {
    std::size_t i = 0;
    for (int j : J) {
      c.near(cw.weight(J, j), w[i++], 1e-12, fmt("w_%d", j + 1) + J.to_string());
      ++entries;
    }
  }
  c(entries == 32, fmt("%d weights", entries));

  // Eight-hypothesis graph: every J reached by ten random removal orders of
  // its complement agrees with the closure table, and weights stay a
  // sub-probability vector.
  const WeightingGraph g = fixtures::appendix_graph();
  const ClosureWeights big = closure_weights(g);
  std::mt19937_64 rng(31);
  double dev = 0.0, excess = 0.0;
  int sets = 0;
  for (IndexSet J : nonempty_subsets(IndexSet::full(8))) {
    const auto drop = (IndexSet::full(8) - J).members();
    double sum = 0.0;
    for (int j : J) sum += big.weight(J, j);
    excess = std::max(excess, sum - 1.0);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<int> order(drop.begin(), drop.end());
      std::shuffle(order.begin(), order.end(), rng);
      WeightingGraph h = g;
      for (int j : order) h = h.without_node(j);
      for (int j = 0; j < 8; ++j) dev = std::max(dev, std::abs(h.weight(j) - big.weight(J, j)));
    }
    ++sets;
  }
  c(dev <= 1e-12, fmt("order deviation %.2e", dev));
  c(excess <= 1e-12, fmt("weight sum excess %.2e", excess));
  // The graph is complete, so no weight is lost.
  c.near(big.weight(IndexSet::full(8), 0) * 4, 1.0, 1e-12, "initial weights");
  o.pass = c.failed.empty();
  o.detail = c.summary() + fmt(", %d sets x 10 orders, max deviation %.1e", sets, dev);
  return o;
}

// ---- simulations ----------------------------------------------------------

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

sim::SimulationConfig base_config(const sim::Scenario& s, sim::DroppingRule rule) {
  sim::SimulationConfig cfg;
  cfg.scenario = s;
  cfg.rule = rule;
  cfg.threads = threads();
  return cfg;
}

sim::PowerReport run_one(sim::SimulationConfig cfg, sim::Method m, const sim::StudyDesign& design) {
  cfg.methods = {m};
  return sim::run_study(cfg, &design).front();
}

const sim::DroppingRule kRules[] = {sim::DroppingRule::Conservative, sim::DroppingRule::Normal,
                                    sim::DroppingRule::Aggressive, sim::DroppingRule::UltraAggressive};

Outcome fwer_table() {
  Outcome o{"familywise error under the global null"};
  const auto t0 = Clock::now();
  Checks c;
  const sim::StudyDesign design(4, 100, 0.5, 0.025);
  std::string cells;
  auto bound_check = [&](const sim::PowerReport& r, const char* label) {
    const double v = r.fwer->value, se = r.fwer->se;
    c(v <= 0.025 + 3.0 * se, fmt("%s %.2f%% (se %.2f)", label, 100 * v, 100 * se));
  };

  sim::Scenario null{"null", {0, 0, 0, 0}};
  null.rho = 0.5;
  auto cfg = base_config(null, sim::DroppingRule::Conservative);
  cfg.combo_replicates = 100'000;
  cfg.cer_stage1_replicates = 20'000;
  cfg.cer_stage2_replicates = 50;
  const auto combo = run_one(cfg, sim::Method::Combo, design);
  const auto cer = run_one(cfg, sim::Method::Cer, design);
  c.near(100 * combo.fwer->value, 1.18, 0.35, "Combo conservative rho 0.5 (%)");
  c.near(100 * cer.fwer->value, 2.47, 0.35, "CER conservative rho 0.5 (%)");
  bound_check(combo, "Combo conservative 0.5");
  bound_check(cer, "CER conservative 0.5");
  cells += fmt("Combo %.2f%% (%lld draws), CER %.2f%% (%lld x %lld draws) at the reference cell", 100 * combo.fwer->value,
               static_cast<long long>(combo.draws), 100 * cer.fwer->value, static_cast<long long>(cer.clusters),
               static_cast<long long>(cer.draws / std::max<std::int64_t>(cer.clusters, 1)));

  // Remaining rule and correlation cells at reduced size.
  double worst = 0.0;
  for (double rho : {0.0, 0.5, 0.8}) {
    for (auto rule : kRules) {
      if (rho == 0.5 && rule == sim::DroppingRule::Conservative) continue;
      sim::Scenario s = null;
      s.rho = rho;
      auto small = base_config(s, rule);
      small.combo_replicates = 20'000;
      small.cer_stage1_replicates = 1'000;
      small.cer_stage2_replicates = 20;
      small.seed = 1000 + static_cast<std::uint64_t>(rho * 10) * 10 + static_cast<std::uint64_t>(rule);
      for (auto m : {sim::Method::Combo, sim::Method::Cer}) {
        const auto r = run_one(small, m, design);
        const std::string label = fmt("%s %s rho %.1f", sim::to_string(m), sim::to_string(rule), rho);
        bound_check(r, label.c_str());
        worst = std::max(worst, (r.fwer->value - 0.025) / std::max(r.fwer->se, 1e-12));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.pass = c.failed.empty();
  o.detail = c.summary() + "; " + cells + fmt("; worst (fwer - 2.5%%)/se %.2f over 22 reduced cells, %.0fs", worst, secs);
  return o;
}

Outcome power_table() {
  Outcome o{"disjunctive and conjunctive power"};
  const auto t0 = Clock::now();
  Checks c;
  const sim::StudyDesign design(4, 100, 0.5, 0.025);
  struct Cell {
    const char* label;
    std::vector<double> effects;
    sim::DroppingRule rule;
    double cer, combo;
  };
  const std::vector<Cell> cells = {
      {"S1", {0.4, 0, 0, 0}, sim::DroppingRule::Conservative, 70.2, 58.2},
      {"S2", {0.4, 0.4, 0, 0}, sim::DroppingRule::Normal, 86.6, 80.9},
  };
  std::string detail;
  for (const auto& cell : cells) {
    sim::Scenario s{cell.label, cell.effects};
    auto cfg = base_config(s, cell.rule);
    cfg.combo_replicates = 20'000;
    cfg.cer_stage1_replicates = 20'000;
    cfg.cer_stage2_replicates = 1;
    cfg.seed = 77 + cell.effects.size() + static_cast<std::uint64_t>(cell.rule);
    const auto cer = run_one(cfg, sim::Method::Cer, design);
    const auto combo = run_one(cfg, sim::Method::Combo, design);
    const std::string tag = std::string(cell.label) + " " + sim::to_string(cell.rule);
    c.near(100 * cer.disjunctive->value, cell.cer, 1.0, tag + " CER disjunctive (%)");
    c.near(100 * combo.disjunctive->value, cell.combo, 1.0, tag + " Combo disjunctive (%)");
    for (auto which : {&sim::PowerReport::disjunctive, &sim::PowerReport::conjunctive}) {
      const auto& a = *(cer.*which);
      const auto& b = *(combo.*which);
      const double se = std::hypot(a.se, b.se);
      c(a.value >= b.value - 3.0 * se, tag + fmt(" CER %.3f below Combo %.3f", a.value, b.value));
    }
    detail += fmt("; %s CER %.1f/%.1f Combo %.1f/%.1f", tag.c_str(), 100 * cer.disjunctive->value,
                  100 * cer.conjunctive->value, 100 * combo.disjunctive->value, 100 * combo.conjunctive->value);
  }
  o.pass = c.failed.empty();
  o.detail = c.summary() + detail + fmt(", %.0fs", seconds_since(t0));
  return o;
}

// ---- property suites ------------------------------------------------------

Outcome property_suites() {
  Outcome o{"property suites (a)-(f)"};
  const auto t0 = Clock::now();
  std::string failed, passed;
  for (const auto& r : props::run_all()) {
    std::string& to = r.pass ? passed : failed;
    to += (to.empty() ? "" : " ") + r.name.substr(0, 3);
    if (!r.pass) failed += " [" + r.detail + "]";
  }
  o.pass = failed.empty();
  o.detail = "passed " + passed + (failed.empty() ? "" : "; failed " + failed) + fmt(", %.0fs", seconds_since(t0));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {combo_example, cer_example, closure_golden,
                                                          fwer_table,    power_table, property_suites};
  int failed = 0;
  for (const auto& run : criteria) {
    const Outcome o = run();
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", o.name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
