#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adaptmt/adaptation.hpp"
#include "adaptmt/graph.hpp"
#include "adaptmt/stagewise.hpp"

namespace adaptmt {

struct CerDesign {
  WeightingGraph graph;
  CorrelationKnowledge knowledge;
  double alpha = 0.025;
  double info_fraction = 0.5;
  // Per-set stage-one levels replacing the common spend for those sets.
  std::vector<std::pair<IndexSet, double>> alpha1_overrides;
};

struct Boundaries {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Pre-planned boundaries of one intersection hypothesis.
struct SetPlan {
  IndexSet J;
  WeightedPartition partition;
  double alpha1 = 0.0;
  Boundaries c;
};

// c1 spends alpha1 at stage one, c2 spends alpha over both stages.
Boundaries plan_boundaries(const WeightedPartition& partition, double alpha, double alpha1, double t,
                           MvnOptions opt = {});

// P(Z_2 >= z(c) | Z_1 = z1) for cumulative z statistics at fraction t.
double conditional_stage2_tail(double z1, double t, double c);

// Stage-two rejection probability of a partition given the stage-one
// statistics: blocks of increments with the block correlation, member j
// continuing from z1[j] at fraction t[j] and rejecting above z(w_j c).
// z1 and t are full length.
double conditional_union(const WeightedPartition& partition, double c, std::span<const double> z1,
                         std::span<const double> t, MvnOptions opt = {});

class CerEngine {
 public:
  explicit CerEngine(CerDesign design);

  const CerDesign& design() const { return design_; }
  int size() const { return design_.graph.size(); }
  const ClosureWeights& closure() const { return closure_; }
  double common_alpha1() const { return alpha1_; }

  // Memoised and thread-safe; computed on first use.
  const SetPlan& plan(IndexSet J) const;

  bool stage1_rejects(IndexSet J, std::span<const double> p1) const;
  // Conditional error B_J given full-length stage-one z statistics.
  double conditional_error(IndexSet J, std::span<const double> z1, MvnOptions opt = {}) const;

 private:
  struct Memo;
  CerDesign design_;
  ClosureWeights closure_;
  double alpha1_ = 0.0;
  std::vector<double> override_table_;  // by mask; negative means none
  std::shared_ptr<Memo> memo_;
};

struct CerSetRow {
  IndexSet J;
  TestType type = TestType::NA;
  double alpha1 = 0.0;
  Boundaries c;
  bool rejected = false;
  // Conditional error; present for sets not rejected at stage one.
  std::optional<double> B;
};

struct CerInterimState {
  int k = 0;
  std::vector<double> p1;
  std::vector<double> z1;
  std::vector<CerSetRow> rows;  // closure-table order
  IndexSet early_rejected;

  std::vector<IndexSet> rejected_sets() const;
  const CerSetRow& row(IndexSet J) const;
};

CerInterimState cer_interim(const CerEngine& engine, std::span<const double> p1);

// Stage-two view of the design after adaptation: revised weights, adapted
// information fractions and increment correlations.
class CerAdaptedDesign {
 public:
  CerAdaptedDesign(const CerEngine& engine, const Adaptation& adaptation);

  IndexSet selected() const { return weights_.selected(); }
  std::span<const double> info_fraction() const { return t_; }
  const RevisedWeights& weights() const { return weights_; }
  const CorrelationKnowledge& knowledge() const { return knowledge_; }
  // Partition of J & I_2 under revised weights and stage-two correlations.
  WeightedPartition partition(IndexSet J) const;

 private:
  RevisedWeights weights_;
  std::vector<double> t_;
  CorrelationKnowledge knowledge_;
};

struct AdaptedBoundary {
  // The set is rejected whatever the stage-two data (B >= 1).
  bool reject_outright = false;
  double c2 = 0.0;
  WeightedPartition partition;
};

// Solves conditional_union(partition, c) = B for c on (0, 1 / max weight].
// Returns c2 = 0 when even the smallest boundary exceeds B.
AdaptedBoundary adapt_boundary(double B, WeightedPartition partition, std::span<const double> z1,
                               std::span<const double> t, MvnOptions opt = {});

// Cumulative p-value from a stage-one p-value and an incremental stage-two
// p-value at adapted fraction t.
double adapted_cumulative_p(double p1, double p2inc, double t);

// I_1 / (I_1 + I_2) with I = (1/n_treat + 1/n_control)^-1 per stage.
double adapted_information_fraction(double n1_treat, double n1_control, double n2_treat, double n2_control);

struct CerAuditRow {
  IndexSet J;
  JGroup group = JGroup::Rejected;
  TestType type = TestType::NA;
  double B = 0.0;
  double c2 = 0.0;  // adapted boundary; 0 for group B
  std::vector<double> thresholds;  // w~_j c2, full length
  bool rejected = false;
};

struct CerDecision {
  std::vector<CerAuditRow> audit;
  IndexSet stage1_rejected;
  IndexSet stage2_rejected;
  IndexSet rejected() const { return stage1_rejected | stage2_rejected; }
};

// p2 holds cumulative adapted p-values, one entry per hypothesis; entries
// outside I_2 are ignored.
CerDecision cer_final(const CerEngine& engine, const CerInterimState& state, const Adaptation& adaptation,
                      std::span<const double> p2);

}  // namespace adaptmt
