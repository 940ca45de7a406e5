#include "adaptmt/sim.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "adaptmt/error.hpp"
#include "adaptmt/kernels/kernels.hpp"
#include "adaptmt/normal.hpp"

namespace adaptmt::sim {

const char* to_string(DroppingRule r) {
  switch (r) {
    case DroppingRule::Conservative: return "Conservative";
    case DroppingRule::Normal: return "Normal";
    case DroppingRule::Aggressive: return "Aggressive";
    case DroppingRule::UltraAggressive: return "UltraAggressive";
  }
  return "?";
}

namespace {
std::string squash(const std::string& s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '_' && c != '-') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}
}  // namespace

DroppingRule parse_dropping_rule(const std::string& s) {
  const std::string k = squash(s);
  if (k == "conservative") return DroppingRule::Conservative;
  if (k == "normal" || k == "moderate") return DroppingRule::Normal;
  if (k == "aggressive") return DroppingRule::Aggressive;
  if (k == "ultraaggressive" || k == "ultra") return DroppingRule::UltraAggressive;
  throw ValidationError("unknown dropping rule '" + s + "'");
}

const char* to_string(Method m) { return m == Method::Cer ? "CER" : "Combo"; }

Method parse_method(const std::string& s) {
  const std::string k = squash(s);
  if (k == "cer") return Method::Cer;
  if (k == "combo" || k == "pvcomb") return Method::Combo;
  throw ValidationError("unknown method '" + s + "'");
}

void SimulationConfig::validate() const {
  const int m = scenario.arms();
  if (m < 1 || 2 * m > kMaxHypotheses) throw ValidationError("scenario.effects: need between 1 and 8 arms");
  for (double d : scenario.effects)
    if (!std::isfinite(d)) throw ValidationError("scenario.effects: non-finite effect");
  if (!(scenario.sigma > 0.0)) throw ValidationError("scenario.sigma must be positive");
  if (!(scenario.rho >= -1.0 && scenario.rho <= 1.0)) throw ValidationError("scenario.rho must lie in [-1, 1]");
  if (n_per_arm < 4) throw ValidationError("n_per_arm must be at least 4");
  if (!(interim_fraction > 0.0 && interim_fraction < 1.0)) throw ValidationError("interim_fraction must lie in (0, 1)");
  const int n1 = static_cast<int>(std::lround(n_per_arm * interim_fraction));
  if (n1 < 2 || n_per_arm - n1 < 2) throw ValidationError("each stage needs at least two subjects per arm");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("alpha must lie in (0, 0.5)");
  if (methods.empty()) throw ValidationError("methods: at least one method required");
  for (Method mt : methods) {
    if (mt == Method::Combo && combo_replicates < 1) throw ValidationError("combo_replicates must be positive");
    if (mt == Method::Cer && (cer_stage1_replicates < 1 || cer_stage2_replicates < 1))
      throw ValidationError("cer replicate counts must be positive");
  }
  if (threads < 1) throw ValidationError("threads must be positive");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double pooled_t_pvalue(double mean_t, double ss_t, int n_t, double mean_c, double ss_c, int n_c) {
  if (n_t < 1 || n_c < 1 || n_t + n_c < 3) throw ValidationError("t-test needs at least three subjects");
  const double df = n_t + n_c - 2;
  const double s2 = std::max(0.0, (ss_t + ss_c) / df);
  const double diff = mean_t - mean_c;
  if (s2 == 0.0) return diff > 0.0 ? 0.0 : (diff < 0.0 ? 1.0 : 0.5);
  const double t = diff / std::sqrt(s2 * (1.0 / n_t + 1.0 / n_c));
  return boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
}

StagePValues simulate_stage_data(const Scenario& sc, std::span<const int> sizes, std::mt19937_64& rng) {
  const int m = sc.arms();
  if (static_cast<int>(sizes.size()) != m + 1) throw ValidationError("simulate_stage_data: need one size per group");
  boost::random::normal_distribution<double> normal;
  const double a = sc.rho;
  const double b = std::sqrt(std::max(0.0, 1.0 - sc.rho * sc.rho));
  struct GroupStats {
    double mean[2] = {0.0, 0.0};
    double ss[2] = {0.0, 0.0};
  };
  std::vector<GroupStats> stats(m + 1);
  std::vector<double> z1, z2, y2;
  for (int g = 0; g <= m; ++g) {
    const int n = sizes[g];
    if (n <= 0) continue;
    z1.resize(n);
    z2.resize(n);
    y2.resize(n);
    for (double& v : z1) v = normal(rng);
    for (double& v : z2) v = normal(rng);
    kernels::affine2(z1, z2, a, b, 0.0, y2);
    const double shift = g == 0 ? 0.0 : sc.effects[g - 1];
    const kernels::Moments mom[2] = {kernels::moments(z1), kernels::moments(y2)};
    for (int e = 0; e < 2; ++e) {
      stats[g].mean[e] = sc.sigma * mom[e].sum / n + shift;
      stats[g].ss[e] = sc.sigma * sc.sigma * std::max(0.0, mom[e].sum_sq - mom[e].sum * mom[e].sum / n);
    }
  }
  StagePValues out;
  out.p.assign(2 * m, 1.0);
  for (int arm = 0; arm < m; ++arm) {
    const int nt = sizes[arm + 1];
    if (nt <= 0 || sizes[0] <= 0) continue;
    for (int e = 0; e < 2; ++e)
      out.p[e * m + arm] = pooled_t_pvalue(stats[arm + 1].mean[e], stats[arm + 1].ss[e], nt, stats[0].mean[e],
                                           stats[0].ss[e], sizes[0]);
  }
  return out;
}

Reallocation apply_dropping_rule(DroppingRule rule, std::span<const double> primary_p, const std::vector<bool>& candidates,
                                 int planned, AllDroppedPolicy policy) {
  const int m = static_cast<int>(primary_p.size());
  if (static_cast<int>(candidates.size()) != m) throw ValidationError("apply_dropping_rule: size mismatch");
  Reallocation r;
  r.continuing.assign(m, false);
  r.sizes.assign(m + 1, 0);
  int best = -1;
  for (int a = 0; a < m; ++a)
    if (candidates[a] && (best < 0 || primary_p[a] < primary_p[best])) best = a;
  if (best < 0) return r;
  if (rule == DroppingRule::UltraAggressive) {
    r.continuing[best] = true;
  } else {
    const double thr = rule == DroppingRule::Conservative ? 0.75 : rule == DroppingRule::Normal ? 0.5 : 0.25;
    bool any = false;
    for (int a = 0; a < m; ++a) {
      r.continuing[a] = candidates[a] && primary_p[a] < thr;
      any = any || r.continuing[a];
    }
    if (!any) {
      if (policy == AllDroppedPolicy::StopTrial) return r;
      r.continuing[best] = true;
    }
  }
  const int kept = static_cast<int>(std::count(r.continuing.begin(), r.continuing.end(), true));
  const int freed = planned * (m - kept);
  const int share = freed / (kept + 1);
  int rem = freed % (kept + 1);
  r.sizes[0] = planned + share + (rem > 0 ? 1 : 0);
  if (rem > 0) --rem;
  for (int a = 0; a < m; ++a) {
    if (!r.continuing[a]) continue;
    r.sizes[a + 1] = planned + share + (rem > 0 ? 1 : 0);
    if (rem > 0) --rem;
  }
  return r;
}

void NestedEstimator::add_cluster(std::int64_t successes, std::int64_t draws) {
  if (draws <= 0 || successes < 0 || successes > draws) throw ValidationError("NestedEstimator: bad cluster");
  if (clusters_ > 0 && draws != draws_per_cluster_) throw ValidationError("NestedEstimator: clusters must be equal-sized");
  draws_per_cluster_ = draws;
  ++clusters_;
  successes_ += successes;
  successes_sq_ += successes * successes;
}

void NestedEstimator::merge(const NestedEstimator& o) {
  if (o.clusters_ == 0) return;
  if (clusters_ > 0 && o.draws_per_cluster_ != draws_per_cluster_)
    throw ValidationError("NestedEstimator: clusters must be equal-sized");
  draws_per_cluster_ = o.draws_per_cluster_;
  clusters_ += o.clusters_;
  successes_ += o.successes_;
  successes_sq_ += o.successes_sq_;
}

double NestedEstimator::mean() const {
  if (clusters_ == 0) return 0.0;
  return static_cast<double>(successes_) / (static_cast<double>(clusters_) * draws_per_cluster_);
}

double NestedEstimator::standard_error() const {
  if (clusters_ < 2) return 0.0;
  const double n = static_cast<double>(clusters_);
  const double d = static_cast<double>(draws_per_cluster_);
  const double mu = static_cast<double>(successes_) / (n * d);
  const double var = (static_cast<double>(successes_sq_) / (d * d) - n * mu * mu) / (n - 1.0);
  return std::sqrt(std::max(0.0, var) / n);
}

WeightingGraph multi_arm_graph(int arms) {
  const int m = arms;
  const int k = 2 * m;
  std::vector<double> w(k, 0.0), G(static_cast<std::size_t>(k) * k, 0.0);
  for (int a = 0; a < m; ++a) {
    w[a] = 1.0 / m;
    if (m == 1) {
      G[a * k + m + a] = 1.0;
      continue;
    }
    G[a * k + m + a] = 0.75;
    for (int b = 0; b < m; ++b) {
      if (b == a) continue;
      G[a * k + b] = 0.25 / (m - 1);
      G[(m + a) * k + b] = 1.0 / (m - 1);
    }
  }
  return WeightingGraph(std::move(w), std::move(G));
}

CorrelationKnowledge multi_arm_knowledge(int arms, std::span<const int> sizes) {
  std::vector<double> nt;
  std::vector<int> members;
  for (int a = 0; a < arms; ++a)
    if (sizes[a + 1] > 0) {
      members.push_back(a);
      nt.push_back(sizes[a + 1]);
    }
  std::vector<CorrelationBlock> blocks;
  if (members.size() > 1 && sizes[0] > 0) {
    const CorrelationMatrix R = many_to_one_correlation(nt, sizes[0]);
    std::vector<int> sec;
    for (int a : members) sec.push_back(arms + a);
    blocks.push_back({IndexSet::from_members(members), R});
    blocks.push_back({IndexSet::from_members(sec), R});
  }
  return CorrelationKnowledge(2 * arms, std::move(blocks));
}

StudyDesign::StudyDesign(int arms, int n_per_arm, double interim_fraction, double alpha)
    : arms_(arms), n_per_arm_(n_per_arm), t_(interim_fraction), alpha_(alpha) {
  if (arms < 1 || 2 * arms > kMaxHypotheses) throw ValidationError("StudyDesign: need between 1 and 8 arms");
  n1_ = static_cast<int>(std::lround(n_per_arm * interim_fraction));
  n2_ = n_per_arm - n1_;
  if (n1_ < 2 || n2_ < 2) throw ValidationError("StudyDesign: each stage needs at least two subjects per arm");
  const WeightingGraph g = multi_arm_graph(arms);
  const std::vector<int> sizes(arms + 1, n1_);
  const CorrelationKnowledge kn = multi_arm_knowledge(arms, sizes);
  // Stage-one fraction by information; with equal allocation this is n1 / n.
  const double t = static_cast<double>(n1_) / n_per_arm;
  combo_ = std::make_shared<ComboEngine>(ComboDesign{g, kn, alpha, t, std::sqrt(t), std::sqrt(1.0 - t), {}});
  cer_ = std::make_shared<CerEngine>(CerDesign{g, kn, alpha, t, {}});
  normalized_ = normalized_closure(g);
}

bool StudyDesign::matches(const SimulationConfig& cfg) const {
  return cfg.scenario.arms() == arms_ && cfg.n_per_arm == n_per_arm_ && cfg.interim_fraction == t_ &&
         cfg.alpha == alpha_;
}

namespace {

constexpr MvnOptions kFast{.estimate_error = false};

// Per-hypothesis lists of the closure sets containing it, largest first; a
// large set is the likeliest to survive, which ends the closed test early.
std::vector<std::vector<IndexSet>> sets_by_member(int k) {
  std::vector<std::vector<IndexSet>> out(k);
  for (IndexSet J : nonempty_subsets(IndexSet::full(k)))
    for (int j : J) out[j].push_back(J);
  return out;
}

struct Tally {
  int m = 0;
  IndexSet false_nulls;
  IndexSet true_nulls;
  NestedEstimator disj, conj, fwer;
  std::vector<NestedEstimator> per;

  void add(std::span<const IndexSet> rejected) {
    std::int64_t d = 0, c = 0, f = 0;
    std::vector<std::int64_t> h(per.size(), 0);
    for (IndexSet R : rejected) {
      d += !(R & false_nulls).empty();
      c += false_nulls.is_subset_of(R);
      f += !(R & true_nulls).empty();
      for (int j : R) ++h[j];
    }
    const auto n = static_cast<std::int64_t>(rejected.size());
    disj.add_cluster(d, n);
    conj.add_cluster(c, n);
    fwer.add_cluster(f, n);
    for (std::size_t j = 0; j < per.size(); ++j) per[j].add_cluster(h[j], n);
  }
  void merge(const Tally& o) {
    disj.merge(o.disj);
    conj.merge(o.conj);
    fwer.merge(o.fwer);
    for (std::size_t j = 0; j < per.size(); ++j) per[j].merge(o.per[j]);
  }
};

// Shared stage-one bookkeeping of one replicate.
struct Interim {
  IndexSet early;
  IndexSet selected;
  Reallocation realloc;
};

template <class RejectsAtStage1>
Interim run_interim(const SimulationConfig& cfg, const StudyDesign& design, std::span<const double> p1,
                    const std::vector<std::vector<IndexSet>>& lists, RejectsAtStage1&& stage1) {
  const int m = design.arms();
  const int k = 2 * m;
  Interim in;
  for (int i = 0; i < k; ++i) {
    bool all = true;
    for (IndexSet J : lists[i])
      if (!stage1(J)) {
        all = false;
        break;
      }
    if (all) in.early = in.early.with(i);
  }
  std::vector<bool> candidates(m);
  for (int a = 0; a < m; ++a) candidates[a] = !in.early.contains(a) || !in.early.contains(m + a);
  in.realloc = apply_dropping_rule(cfg.rule, p1.subspan(0, m), candidates, design.stage2_size(), cfg.all_dropped);
  for (int a = 0; a < m; ++a)
    if (in.realloc.continuing[a]) in.selected = in.selected.with(a).with(m + a);
  in.selected = in.selected - in.early;
  return in;
}

Tally make_tally(const SimulationConfig& cfg) {
  Tally t;
  t.m = cfg.scenario.arms();
  for (int a = 0; a < t.m; ++a) {
    // One-sided nulls: a harmful arm is still a true null.
    if (cfg.scenario.effects[a] > 0.0) {
      t.false_nulls = t.false_nulls.with(a).with(t.m + a);
    } else {
      t.true_nulls = t.true_nulls.with(a).with(t.m + a);
    }
  }
  t.per.resize(2 * t.m);
  return t;
}

// One stage-one draw and one stage-two draw per replicate.
void combo_replicate(const SimulationConfig& cfg, const StudyDesign& design,
                     const std::vector<std::vector<IndexSet>>& lists, std::int64_t r, Tally& tally) {
  const ComboEngine& eng = design.combo();
  const int m = design.arms();
  const int k = 2 * m;
  const std::size_t n = std::size_t{1} << k;
  const SetLevels lv = eng.common_levels();
  auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(r), 0);
  const std::vector<int> sizes1(m + 1, design.stage1_size());
  const std::vector<double> p1 = simulate_stage_data(cfg.scenario, sizes1, rng).p;

  std::vector<double> pJ1(n, -1.0);
  auto stage1_p = [&](IndexSet J) {
    double& v = pJ1[J.bits()];
    if (v < 0.0) v = eng.stage1_p(J, p1, kFast).value;
    return v;
  };
  const Interim in = run_interim(cfg, design, p1, lists, [&](IndexSet J) { return stage1_p(J) <= lv.alpha1; });
  IndexSet rejected = in.early;
  if (!in.selected.empty()) {
    auto rng2 = make_rng(cfg.seed, static_cast<std::uint64_t>(r), 1);
    const std::vector<double> p2 = simulate_stage_data(cfg.scenario, in.realloc.sizes, rng2).p;
    const CorrelationKnowledge k2 = multi_arm_knowledge(m, in.realloc.sizes);
    std::vector<double> pJ2(n, -1.0);
    std::vector<signed char> decided(n, -1);
    auto set_rejected = [&](IndexSet J) {
      signed char& d = decided[J.bits()];
      if (d < 0) {
        if (stage1_p(J) <= lv.alpha1) {
          d = 1;
        } else {
          const IndexSet Jp = J & in.selected;
          double p2J = 1.0;
          if (!Jp.empty()) {
            double& v = pJ2[Jp.bits()];
            if (v < 0.0) v = adjusted_p(partition_weighted(k2, Jp, design.normalized().of(Jp)), p2, kFast).value;
            p2J = v;
          }
          d = eng.combine(stage1_p(J), p2J) <= lv.alpha2;
        }
      }
      return d == 1;
    };
    for (int i : in.selected) {
      bool all = true;
      for (IndexSet J : lists[i])
        if (!set_rejected(J)) {
          all = false;
          break;
        }
      if (all) rejected = rejected.with(i);
    }
  }
  (void)k;
  const IndexSet one[1] = {rejected};
  tally.add(one);
}

// Adapted test of one closure set, solved lazily: the boundary c~ is only
// bracketed as far as the observed stage-two data require.
struct AdaptedSet {
  bool ready = false;
  bool reject_outright = false;
  bool never = false;
  double B = 0.0;
  WeightedPartition part;
  double lo = 0.0;  // F(lo) <= B, so c~ >= lo
  double hi = std::numeric_limits<double>::infinity();  // F(hi) > B
};

void cer_cluster(const SimulationConfig& cfg, const StudyDesign& design, const std::vector<std::vector<IndexSet>>& lists,
                 std::int64_t r, Tally& tally) {
  const CerEngine& eng = design.cer();
  const int m = design.arms();
  const int k = 2 * m;
  const std::size_t n = std::size_t{1} << k;
  auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(r), 0);
  const std::vector<int> sizes1(m + 1, design.stage1_size());
  const std::vector<double> p1 = simulate_stage_data(cfg.scenario, sizes1, rng).p;

  std::vector<signed char> s1(n, -1);
  auto stage1 = [&](IndexSet J) {
    signed char& v = s1[J.bits()];
    if (v < 0) v = eng.stage1_rejects(J, p1);
    return v == 1;
  };
  const Interim in = run_interim(cfg, design, p1, lists, stage1);
  const int R2 = cfg.cer_stage2_replicates;
  std::vector<IndexSet> outcomes(R2, in.early);
  if (!in.selected.empty()) {
    std::vector<double> z1(k), t2(k, design.cer().design().info_fraction);
    for (int j = 0; j < k; ++j) z1[j] = z_from_p(p1[j]);
    for (int a = 0; a < m; ++a)
      if (in.realloc.continuing[a]) {
        const double tt = adapted_information_fraction(design.stage1_size(), design.stage1_size(),
                                                       in.realloc.sizes[a + 1], in.realloc.sizes[0]);
        t2[a] = t2[m + a] = tt;
      }
    const CorrelationKnowledge k2 = multi_arm_knowledge(m, in.realloc.sizes);
    std::vector<AdaptedSet> sets(n);
    auto prepare = [&](IndexSet J) -> AdaptedSet& {
      AdaptedSet& s = sets[J.bits()];
      if (s.ready) return s;
      s.ready = true;
      s.B = eng.conditional_error(J, z1, kFast);
      if (s.B >= 1.0) {
        s.reject_outright = true;
        return s;
      }
      const IndexSet Jp = J & in.selected;
      s.part = partition_weighted(k2, Jp, design.normalized().of(Jp));
      s.never = s.part.blocks.empty() || s.B <= 0.0;
      return s;
    };
    std::vector<double> p2(k, 1.0);
    std::vector<signed char> decided(n);
    for (int s = 0; s < R2; ++s) {
      auto rng2 = make_rng(cfg.seed, static_cast<std::uint64_t>(r), 1 + static_cast<std::uint64_t>(s));
      const std::vector<double> inc = simulate_stage_data(cfg.scenario, in.realloc.sizes, rng2).p;
      for (int j : in.selected) p2[j] = adapted_cumulative_p(p1[j], inc[j], t2[j]);
      std::fill(decided.begin(), decided.end(), -1);
      auto set_rejected = [&](IndexSet J) {
        signed char& d = decided[J.bits()];
        if (d >= 0) return d == 1;
        if (stage1(J)) return (d = 1) == 1;
        AdaptedSet& a = prepare(J);
        if (a.reject_outright) return (d = 1) == 1;
        if (a.never) return (d = 0) == 1;
        // Reject iff min_j p_j / w_j <= c~, i.e. iff F(min) <= B.
        double mn = std::numeric_limits<double>::infinity();
        for (const auto& b : a.part.blocks) {
          std::size_t q = 0;
          for (int j : b.members) mn = std::min(mn, p2[j] / b.weights[q++]);
        }
        if (mn <= a.lo) return (d = 1) == 1;
        if (mn >= a.hi) return (d = 0) == 1;
        if (conditional_union(a.part, mn, z1, t2, kFast) <= a.B) {
          a.lo = mn;
          d = 1;
        } else {
          a.hi = mn;
          d = 0;
        }
        return d == 1;
      };
      for (int i : in.selected) {
        bool all = true;
        for (IndexSet J : lists[i])
          if (!set_rejected(J)) {
            all = false;
            break;
          }
        if (all) outcomes[s] = outcomes[s].with(i);
      }
    }
  }
  tally.add(outcomes);
}

PowerReport finish(const SimulationConfig& cfg, Method method, const Tally& t) {
  PowerReport rep;
  rep.method = method;
  rep.scenario = cfg.scenario.label;
  rep.rule = cfg.rule;
  rep.rho = cfg.scenario.rho;
  rep.clusters = t.disj.clusters();
  rep.draws = t.disj.clusters() * (method == Method::Cer ? cfg.cer_stage2_replicates : 1);
  auto est = [](const NestedEstimator& e) { return Estimate{e.mean(), e.standard_error()}; };
  if (!t.false_nulls.empty()) {
    rep.disjunctive = est(t.disj);
    rep.conjunctive = est(t.conj);
  }
  if (!t.true_nulls.empty()) rep.fwer = est(t.fwer);
  for (const auto& e : t.per) rep.rejection_rate.push_back(est(e));
  return rep;
}

}  // namespace

std::vector<PowerReport> run_study(const SimulationConfig& cfg, const StudyDesign* shared) {
  cfg.validate();
  std::unique_ptr<StudyDesign> own;
  if (shared == nullptr || !shared->matches(cfg)) {
    own = std::make_unique<StudyDesign>(cfg.scenario.arms(), cfg.n_per_arm, cfg.interim_fraction, cfg.alpha);
    shared = own.get();
  }
  const StudyDesign& design = *shared;
  const auto lists = sets_by_member(design.hypotheses());
  std::vector<PowerReport> out;
  for (Method method : cfg.methods) {
    const std::int64_t reps = method == Method::Cer ? cfg.cer_stage1_replicates : cfg.combo_replicates;
    const int T = static_cast<int>(std::min<std::int64_t>(cfg.threads, reps));
    std::vector<Tally> tallies(T, make_tally(cfg));
    std::vector<std::exception_ptr> errors(T);
    auto work = [&](int tid) {
      try {
        for (std::int64_t r = tid; r < reps; r += T) {
          if (method == Method::Cer) {
            cer_cluster(cfg, design, lists, r, tallies[tid]);
          } else {
            combo_replicate(cfg, design, lists, r, tallies[tid]);
          }
        }
      } catch (...) {
        errors[tid] = std::current_exception();
      }
    };
    if (T == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int tid = 0; tid < T; ++tid) pool.emplace_back(work, tid);
      for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    Tally total = make_tally(cfg);
    for (const auto& t : tallies) total.merge(t);
    out.push_back(finish(cfg, method, total));
  }
  return out;
}

void write_power_csv(std::ostream& out, std::span<const PowerReport> reports) {
  out << "scenario,rule,rho,method,disjunctive,disjunctive_se,conjunctive,conjunctive_se,fwer,fwer_se,clusters,draws\n";
  auto pct = [&](const std::optional<Estimate>& e) {
    std::ostringstream s;
    if (e) {
      s << std::fixed << std::setprecision(3) << 100.0 * e->value << ',' << std::setprecision(4) << 100.0 * e->se;
    } else {
      s << "n/a,n/a";
    }
    return s.str();
  };
  for (const auto& r : reports) {
    out << r.scenario << ',' << to_string(r.rule) << ',' << r.rho << ',' << to_string(r.method) << ','
        << pct(r.disjunctive) << ',' << pct(r.conjunctive) << ',' << pct(r.fwer) << ',' << r.clusters << ','
        << r.draws << '\n';
  }
}

}  // namespace adaptmt::sim
