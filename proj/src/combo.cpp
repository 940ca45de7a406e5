#include "adaptmt/combo.hpp"

#include <cmath>
#include <mutex>

#include "adaptmt/error.hpp"
#include "adaptmt/spending.hpp"

namespace adaptmt {

struct ComboEngine::Memo {
  std::vector<WeightedPartition> parts;
  std::unique_ptr<std::once_flag[]> once;
};

ComboEngine::ComboEngine(ComboDesign design) : design_(std::move(design)), memo_(std::make_shared<Memo>()) {
  const int k = design_.graph.size();
  if (design_.knowledge.size() != k) throw ValidationError("correlation knowledge covers a different number of hypotheses");
  if (!(design_.alpha > 0.0 && design_.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(design_.info_fraction > 0.0 && design_.info_fraction < 1.0))
    throw ValidationError("info_fraction must lie in (0, 1)");
  if (std::abs(design_.nu1 * design_.nu1 + design_.nu2 * design_.nu2 - 1.0) > 1e-12)
    throw ValidationError("combination weights must satisfy nu1^2 + nu2^2 = 1");
  closure_ = closure_weights(design_.graph);
  common_.alpha1 = spend_alpha1(design_.info_fraction, design_.alpha);
  common_.alpha2 = solve_alpha2(design_.alpha, common_.alpha1, design_.nu1, design_.nu2);
  const std::size_t n = std::size_t{1} << k;
  override_table_.assign(n, SetLevels{-1.0, -1.0});
  for (const auto& [J, lv] : design_.level_overrides) {
    if (J.empty() || !J.is_subset_of(IndexSet::full(k))) throw ValidationError("level override for an invalid set");
    if (!(lv.alpha1 >= 0.0 && lv.alpha1 < 1.0 && lv.alpha2 > 0.0 && lv.alpha2 < 1.0))
      throw ValidationError("level override for " + J.to_string() + " out of range");
    override_table_[J.bits()] = lv;
  }
  memo_->parts.resize(n);
  memo_->once = std::make_unique<std::once_flag[]>(n);
}

SetLevels ComboEngine::levels(IndexSet J) const {
  const SetLevels& o = override_table_[J.bits()];
  return o.alpha1 < 0.0 ? common_ : o;
}

const WeightedPartition& ComboEngine::partition(IndexSet J) const {
  std::call_once(memo_->once[J.bits()],
                 [&] { memo_->parts[J.bits()] = partition_weighted(design_.knowledge, J, closure_.of(J)); });
  return memo_->parts[J.bits()];
}

AdjustedP ComboEngine::stage1_p(IndexSet J, std::span<const double> p1, MvnOptions opt) const {
  return adjusted_p(partition(J), p1, opt);
}

double ComboEngine::combine(double p1, double p2) const {
  return inverse_normal_combine(p1, p2, design_.nu1, design_.nu2);
}

std::vector<IndexSet> ComboInterimState::rejected_sets() const {
  std::vector<IndexSet> out;
  for (const auto& r : rows)
    if (r.rejected) out.push_back(r.J);
  return out;
}

const ComboSetRow& ComboInterimState::row(IndexSet J) const {
  for (const auto& r : rows)
    if (r.J == J) return r;
  throw ValidationError("no interim record for set " + J.to_string());
}

ComboInterimState combo_interim(const ComboEngine& engine, std::span<const double> p1) {
  const int k = engine.size();
  if (static_cast<int>(p1.size()) != k)
    throw ValidationError("expected " + std::to_string(k) + " stage-one p-values, got " + std::to_string(p1.size()));
  ComboInterimState st;
  st.k = k;
  st.p1.assign(p1.begin(), p1.end());
  st.levels = engine.common_levels();
  const IndexSet all = IndexSet::full(k);
  for (IndexSet J : nonempty_subsets(all)) {
    const AdjustedP a = engine.stage1_p(J, p1);
    st.rows.push_back({J, a.type, a.value, a.value <= engine.levels(J).alpha1});
  }
  st.early_rejected = early_rejected(all, st.rejected_sets());
  return st;
}

AdjustedP combo_stage2_p(const CorrelationKnowledge& stage2, IndexSet J, const RevisedWeights& weights,
                         std::span<const double> p2inc, MvnOptions opt) {
  return adjusted_p(partition_weighted(stage2, J, weights.of(J)), p2inc, opt);
}

ComboDecision combo_final(const ComboEngine& engine, const ComboInterimState& state, const Adaptation& adaptation,
                          std::span<const double> p2inc) {
  const int k = engine.size();
  if (state.k != k) throw ValidationError("interim state does not match the design");
  if (static_cast<int>(p2inc.size()) != k)
    throw ValidationError("expected " + std::to_string(k) + " stage-two p-values (unselected entries are ignored)");
  const IndexSet i2 = adaptation.selected;
  const IndexSet all = IndexSet::full(k);
  if (!i2.is_subset_of(all - state.early_rejected))
    throw ValidationError("selected set " + i2.to_string() + " includes hypotheses rejected at stage one");
  std::vector<double> p2(k, 1.0);
  for (int j : i2) {
    if (!(p2inc[j] >= 0.0 && p2inc[j] <= 1.0))
      throw ValidationError("missing or invalid stage-two p-value for H" + std::to_string(j + 1));
    p2[j] = p2inc[j];
  }
  const CorrelationKnowledge& k2 = adaptation.stage2_knowledge ? *adaptation.stage2_knowledge : engine.design().knowledge;
  if (k2.size() != k) throw ValidationError("stage-two correlation knowledge size mismatch");
  const RevisedWeights revised(engine.design().graph, adaptation);

  ComboDecision out;
  std::vector<char> rejected(std::size_t{1} << k, 0);
  for (const auto& r : state.rows) {
    ComboAuditRow a;
    a.J = r.J;
    a.type1 = r.type;
    a.p1 = r.p1;
    const SetLevels lv = engine.levels(r.J);
    a.alpha1 = lv.alpha1;
    a.alpha2 = lv.alpha2;
    if (r.rejected) {
      a.group = JGroup::Rejected;
      a.rejected = true;
    } else {
      a.group = classify(r.J, i2);
      if (a.group != JGroup::B) {
        const AdjustedP s2 = combo_stage2_p(k2, r.J & i2, revised, p2);
        a.type2 = s2.type;
        a.p2 = s2.value;
      }
      a.combined = engine.combine(a.p1, a.p2);
      a.rejected = a.combined <= lv.alpha2;
    }
    rejected[r.J.bits()] = a.rejected;
    out.audit.push_back(a);
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
