#include "adaptmt/cer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "adaptmt/error.hpp"
#include "adaptmt/normal.hpp"
#include "adaptmt/root.hpp"
#include "adaptmt/spending.hpp"

namespace adaptmt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSmallestBoundary = 1e-12;
constexpr RootOptions kBoundaryRoot{.f_tol = 1e-15, .x_tol = 1e-12, .max_iter = 200};

double max_weight(const WeightedPartition& part) {
  double m = 0.0;
  for (const auto& b : part.blocks)
    for (double w : b.weights) m = std::max(m, w);
  return m;
}

bool all_singletons(const WeightedPartition& part) {
  return std::all_of(part.blocks.begin(), part.blocks.end(), [](const WeightedBlock& b) { return b.weights.size() == 1; });
}

double total_weight(const WeightedPartition& part) {
  double s = 0.0;
  for (const auto& b : part.blocks) s += b.weight_sum();
  return s;
}

double stage1_union(const WeightedPartition& part, double c, MvnOptions opt) {
  double total = 0.0;
  std::vector<double> z;
  for (const auto& b : part.blocks) {
    if (b.weights.size() == 1) {
      total += std::min(1.0, b.weights[0] * c);
      continue;
    }
    z.clear();
    for (double w : b.weights) z.push_back(z_from_p(w * c));
    total += mvn_upper_orthant_union(z, b.corr, opt).value;
  }
  return total;
}

double two_stage_union(const WeightedPartition& part, double c1, double c2, double t, MvnOptions opt) {
  double total = 0.0;
  std::vector<double> a, bb;
  for (const auto& b : part.blocks) {
    a.clear();
    bb.clear();
    for (double w : b.weights) {
      a.push_back(z_from_p(w * c1));
      bb.push_back(z_from_p(w * c2));
    }
    if (b.weights.size() == 1) {
      total += (a[0] == -kInf || bb[0] == -kInf) ? 1.0 : 1.0 - bvn_lower(a[0], bb[0], std::sqrt(t));
      continue;
    }
    total += mvn_two_stage_union(a, bb, b.corr, t, opt).value;
  }
  return total;
}

// Root of an increasing boundary-spend function, searched in log c.
template <class F>
double solve_boundary(F&& spend, double target, double hi) {
  auto f = [&](double logc) { return spend(std::exp(logc)) - target; };
  return std::exp(find_root(f, std::log(kSmallestBoundary), std::log(hi), kBoundaryRoot));
}

}  // namespace

Boundaries plan_boundaries(const WeightedPartition& part, double alpha, double alpha1, double t, MvnOptions opt) {
  if (part.blocks.empty()) throw ValidationError("plan_boundaries: no positive weight in the set");
  if (!(alpha1 >= 0.0 && alpha1 < alpha)) throw ValidationError("plan_boundaries: need 0 <= alpha1 < alpha");
  const double hi = 1.0 / max_weight(part);
  Boundaries c;
  if (alpha1 == 0.0) {
    c.c1 = 0.0;
  } else if (all_singletons(part)) {
    c.c1 = std::min(hi, alpha1 / total_weight(part));
  } else {
    c.c1 = solve_boundary([&](double x) { return stage1_union(part, x, opt); }, alpha1, hi);
  }
  c.c2 = solve_boundary([&](double x) { return two_stage_union(part, c.c1, x, t, opt); }, alpha, hi);
  return c;
}

double conditional_stage2_tail(double z1, double t, double c) {
  if (c >= 1.0) return 1.0;
  if (c <= 0.0) return 0.0;
  return std_normal_sf((z_from_p(c) - std::sqrt(t) * z1) / std::sqrt(1.0 - t));
}

double conditional_union(const WeightedPartition& part, double c, std::span<const double> z1,
                         std::span<const double> t, MvnOptions opt) {
  double total = 0.0;
  std::vector<double> beta;
  for (const auto& b : part.blocks) {
    beta.clear();
    std::size_t m = 0;
    for (int j : b.members) {
      const double q = b.weights[m++] * c;
      if (q >= 1.0 || z1[j] == kInf) {
        beta.push_back(-kInf);
      } else if (q <= 0.0 || z1[j] == -kInf) {
        beta.push_back(kInf);
      } else {
        beta.push_back((z_from_p(q) - std::sqrt(t[j]) * z1[j]) / std::sqrt(1.0 - t[j]));
      }
    }
    if (beta.size() == 1) {
      total += std_normal_sf(beta[0]);
    } else {
      total += mvn_upper_orthant_union(beta, b.corr, opt).value;
    }
  }
  return total;
}

struct CerEngine::Memo {
  std::vector<SetPlan> plans;
  std::unique_ptr<std::once_flag[]> once;
};

CerEngine::CerEngine(CerDesign design) : design_(std::move(design)), memo_(std::make_shared<Memo>()) {
  const int k = design_.graph.size();
  if (design_.knowledge.size() != k) throw ValidationError("correlation knowledge covers a different number of hypotheses");
  if (!(design_.alpha > 0.0 && design_.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(design_.info_fraction > 0.0 && design_.info_fraction < 1.0))
    throw ValidationError("info_fraction must lie in (0, 1)");
  closure_ = closure_weights(design_.graph);
  alpha1_ = spend_alpha1(design_.info_fraction, design_.alpha);
  const std::size_t n = std::size_t{1} << k;
  override_table_.assign(n, -1.0);
  for (const auto& [J, a1] : design_.alpha1_overrides) {
    if (J.empty() || !J.is_subset_of(IndexSet::full(k))) throw ValidationError("alpha1 override for an invalid set");
    if (!(a1 >= 0.0 && a1 < design_.alpha))
      throw ValidationError("alpha1 override for " + J.to_string() + " must lie in [0, alpha)");
    override_table_[J.bits()] = a1;
  }
  memo_->plans.resize(n);
  memo_->once = std::make_unique<std::once_flag[]>(n);
}

const SetPlan& CerEngine::plan(IndexSet J) const {
  if (J.empty() || !J.is_subset_of(IndexSet::full(size()))) throw ValidationError("plan: invalid set " + J.to_string());
  std::call_once(memo_->once[J.bits()], [&] {
    SetPlan p;
    p.J = J;
    p.partition = partition_weighted(design_.knowledge, J, closure_.of(J));
    const double o = override_table_[J.bits()];
    p.alpha1 = o < 0.0 ? alpha1_ : o;
    if (!p.partition.blocks.empty())
      p.c = plan_boundaries(p.partition, design_.alpha, p.alpha1, design_.info_fraction);
    memo_->plans[J.bits()] = std::move(p);
  });
  return memo_->plans[J.bits()];
}

bool CerEngine::stage1_rejects(IndexSet J, std::span<const double> p1) const {
  const SetPlan& p = plan(J);
  for (const auto& b : p.partition.blocks) {
    std::size_t m = 0;
    for (int j : b.members)
      if (p1[j] <= b.weights[m++] * p.c.c1) return true;
  }
  return false;
}

double CerEngine::conditional_error(IndexSet J, std::span<const double> z1, MvnOptions opt) const {
  const SetPlan& p = plan(J);
  const std::vector<double> t(size(), design_.info_fraction);
  return conditional_union(p.partition, p.c.c2, z1, t, opt);
}

std::vector<IndexSet> CerInterimState::rejected_sets() const {
  std::vector<IndexSet> out;
  for (const auto& r : rows)
    if (r.rejected) out.push_back(r.J);
  return out;
}

const CerSetRow& CerInterimState::row(IndexSet J) const {
  for (const auto& r : rows)
    if (r.J == J) return r;
  throw ValidationError("no interim record for set " + J.to_string());
}

CerInterimState cer_interim(const CerEngine& engine, std::span<const double> p1) {
  const int k = engine.size();
  if (static_cast<int>(p1.size()) != k)
    throw ValidationError("expected " + std::to_string(k) + " stage-one p-values, got " + std::to_string(p1.size()));
  for (double p : p1)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("stage-one p-values must lie in [0, 1]");
  CerInterimState st;
  st.k = k;
  st.p1.assign(p1.begin(), p1.end());
  for (double p : p1) st.z1.push_back(z_from_p(p));
  const IndexSet all = IndexSet::full(k);
  for (IndexSet J : nonempty_subsets(all)) {
    const SetPlan& plan = engine.plan(J);
    CerSetRow r;
    r.J = J;
    r.type = plan.partition.type;
    r.alpha1 = plan.alpha1;
    r.c = plan.c;
    r.rejected = !plan.partition.blocks.empty() && engine.stage1_rejects(J, p1);
    if (!r.rejected) r.B = plan.partition.blocks.empty() ? 0.0 : engine.conditional_error(J, st.z1);
    st.rows.push_back(std::move(r));
  }
  st.early_rejected = early_rejected(all, st.rejected_sets());
  return st;
}

CerAdaptedDesign::CerAdaptedDesign(const CerEngine& engine, const Adaptation& adaptation)
    : weights_(engine.design().graph, adaptation),
      knowledge_(adaptation.stage2_knowledge ? *adaptation.stage2_knowledge : engine.design().knowledge) {
  const int k = engine.size();
  if (knowledge_.size() != k) throw ValidationError("stage-two correlation knowledge size mismatch");
  if (adaptation.info_fraction.empty()) {
    t_.assign(k, engine.design().info_fraction);
  } else {
    if (static_cast<int>(adaptation.info_fraction.size()) != k)
      throw ValidationError("adapted information fractions need one entry per hypothesis");
    t_ = adaptation.info_fraction;
    for (int j : adaptation.selected)
      if (!(t_[j] > 0.0 && t_[j] < 1.0))
        throw ValidationError("adapted information fraction for H" + std::to_string(j + 1) + " must lie in (0, 1)");
  }
}

WeightedPartition CerAdaptedDesign::partition(IndexSet J) const {
  const IndexSet Jp = J & selected();
  return partition_weighted(knowledge_, Jp, weights_.of(Jp));
}

AdaptedBoundary adapt_boundary(double B, WeightedPartition part, std::span<const double> z1, std::span<const double> t,
                               MvnOptions opt) {
  AdaptedBoundary out;
  out.partition = std::move(part);
  if (B >= 1.0) {
    out.reject_outright = true;
    return out;
  }
  if (B <= 0.0 || out.partition.blocks.empty()) return out;
  const auto& blocks = out.partition.blocks;
  if (blocks.size() == 1 && blocks[0].weights.size() == 1) {
    const int j = blocks[0].members.min();
    const double w = blocks[0].weights[0];
    if (z1[j] == kInf) {
      out.reject_outright = true;
      return out;
    }
    if (z1[j] == -kInf) return out;
    out.c2 = std::min(1.0 / w, std_normal_sf(std::sqrt(t[j]) * z1[j] + std::sqrt(1.0 - t[j]) * z_from_p(B)) / w);
    return out;
  }
  auto F = [&](double c) { return conditional_union(out.partition, c, z1, t, opt); };
  if (F(kSmallestBoundary) >= B) return out;
  out.c2 = solve_boundary(F, B, 1.0 / max_weight(out.partition));
  return out;
}

double adapted_cumulative_p(double p1, double p2inc, double t) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2inc >= 0.0 && p2inc <= 1.0))
    throw ValidationError("adapted_cumulative_p: p-values must lie in [0, 1]");
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("adapted_cumulative_p: t must lie in (0, 1)");
  return inverse_normal_combine(p1, p2inc, std::sqrt(t), std::sqrt(1.0 - t));
}

double adapted_information_fraction(double n1_treat, double n1_control, double n2_treat, double n2_control) {
  if (!(n1_treat > 0 && n1_control > 0 && n2_treat > 0 && n2_control > 0))
    throw ValidationError("adapted_information_fraction: sample sizes must be positive");
  const double i1 = 1.0 / (1.0 / n1_treat + 1.0 / n1_control);
  const double i2 = 1.0 / (1.0 / n2_treat + 1.0 / n2_control);
  return i1 / (i1 + i2);
}

CerDecision cer_final(const CerEngine& engine, const CerInterimState& state, const Adaptation& adaptation,
                      std::span<const double> p2) {
  const int k = engine.size();
  if (state.k != k) throw ValidationError("interim state does not match the design");
  if (static_cast<int>(p2.size()) != k)
    throw ValidationError("expected " + std::to_string(k) + " stage-two p-values (unselected entries are ignored)");
  const IndexSet i2 = adaptation.selected;
  const IndexSet all = IndexSet::full(k);
  if (!i2.is_subset_of(all - state.early_rejected))
    throw ValidationError("selected set " + i2.to_string() + " includes hypotheses rejected at stage one");
  for (int j : i2)
    if (!(p2[j] >= 0.0 && p2[j] <= 1.0))
      throw ValidationError("missing or invalid stage-two p-value for H" + std::to_string(j + 1));
  const CerAdaptedDesign adapted(engine, adaptation);

  CerDecision out;
  for (const auto& r : state.rows) {
    CerAuditRow a;
    a.J = r.J;
    a.thresholds.assign(k, 0.0);
    if (r.rejected) {
      a.group = JGroup::Rejected;
      a.type = r.type;
      a.rejected = true;
      out.audit.push_back(std::move(a));
      continue;
    }
    a.group = classify(r.J, i2);
    a.B = r.B.value_or(0.0);
    if (a.group == JGroup::B) {
      out.audit.push_back(std::move(a));
      continue;
    }
    const AdaptedBoundary ab = adapt_boundary(a.B, adapted.partition(r.J), state.z1, adapted.info_fraction());
    a.type = ab.partition.type;
    a.c2 = ab.c2;
    if (ab.reject_outright) {
      a.rejected = true;
    } else {
      for (const auto& b : ab.partition.blocks) {
        std::size_t m = 0;
        for (int j : b.members) {
          a.thresholds[j] = b.weights[m++] * ab.c2;
          if (p2[j] <= a.thresholds[j]) a.rejected = true;
        }
      }
    }
    out.audit.push_back(std::move(a));
  }
  out.stage1_rejected = state.early_rejected;
  for (int i : i2) {
    bool all_rej = true;
    for (const auto& a : out.audit)
      if (a.J.contains(i) && !a.rejected) {
        all_rej = false;
        break;
      }
    if (all_rej) out.stage2_rejected = out.stage2_rejected.with(i);
  }
  return out;
}

}  // namespace adaptmt
