#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "adaptmt/adaptation.hpp"
#include "adaptmt/graph.hpp"
#include "adaptmt/stagewise.hpp"

namespace adaptmt {

struct SetLevels {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct ComboDesign {
  WeightingGraph graph;
  CorrelationKnowledge knowledge;
  double alpha = 0.025;
  double info_fraction = 0.5;
  double nu1 = 0.7071067811865476;
  double nu2 = 0.7071067811865476;
  // Per-set levels replacing the common spend for those sets.
  std::vector<std::pair<IndexSet, SetLevels>> level_overrides;
};

// Shared per-set computations for the combination method; used both by the
// full-table functions below and by the lazy closed tests of the simulator.
class ComboEngine {
 public:
  explicit ComboEngine(ComboDesign design);

  const ComboDesign& design() const { return design_; }
  int size() const { return design_.graph.size(); }
  const ClosureWeights& closure() const { return closure_; }
  SetLevels common_levels() const { return common_; }
  SetLevels levels(IndexSet J) const;

  // Stage-one block partition of J (memoised, thread-safe).
  const WeightedPartition& partition(IndexSet J) const;
  AdjustedP stage1_p(IndexSet J, std::span<const double> p1, MvnOptions opt = {}) const;
  double combine(double p1, double p2) const;

 private:
  struct Memo;
  ComboDesign design_;
  ClosureWeights closure_;
  SetLevels common_;
  std::vector<SetLevels> override_table_;  // indexed by mask; alpha1 < 0 means none
  std::shared_ptr<Memo> memo_;
};

struct ComboSetRow {
  IndexSet J;
  TestType type = TestType::NA;
  double p1 = 1.0;
  bool rejected = false;
};

struct ComboInterimState {
  int k = 0;
  std::vector<double> p1;
  SetLevels levels;
  std::vector<ComboSetRow> rows;  // closure-table order
  IndexSet early_rejected;

  std::vector<IndexSet> rejected_sets() const;
  const ComboSetRow& row(IndexSet J) const;
};

ComboInterimState combo_interim(const ComboEngine& engine, std::span<const double> p1);

// Stage-two adjusted p-value of a set within I_2 from incremental p-values.
AdjustedP combo_stage2_p(const CorrelationKnowledge& stage2, IndexSet J, const RevisedWeights& weights,
                         std::span<const double> p2inc, MvnOptions opt = {});

struct ComboAuditRow {
  IndexSet J;
  JGroup group = JGroup::Rejected;
  TestType type1 = TestType::NA;
  TestType type2 = TestType::NA;
  double p1 = 1.0;
  double p2 = 1.0;
  double combined = 1.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool rejected = false;
};

struct ComboDecision {
  std::vector<ComboAuditRow> audit;
  IndexSet stage1_rejected;
  IndexSet stage2_rejected;
  IndexSet rejected() const { return stage1_rejected | stage2_rejected; }
};

// p2inc has one entry per hypothesis; entries outside I_2 are ignored.
ComboDecision combo_final(const ComboEngine& engine, const ComboInterimState& state, const Adaptation& adaptation,
                          std::span<const double> p2inc);

}  // namespace adaptmt
