#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adaptmt/graph.hpp"
#include "adaptmt/index_set.hpp"
#include "adaptmt/stagewise.hpp"

namespace adaptmt {

// Interim design changes: selection of I_2, a revised graph, adapted
// information fractions and stage-two increment correlations.
struct Adaptation {
  IndexSet selected;
  // Revised graph over the original k indices. Defaults to the design graph,
  // whose closure restricted to subsets of I_2 is the reduced graph's closure.
  std::optional<WeightingGraph> graph;
  // Adapted information fraction per hypothesis index; empty means the
  // planned fraction for every hypothesis.
  std::vector<double> info_fraction;
  // Correlation of stage-two increments; defaults to the design knowledge.
  std::optional<CorrelationKnowledge> stage2_knowledge;
};

// Stage-two weights w~_{j,J} for J within I_2: closure of the revised graph,
// rescaled to sum to one when the closure leaks weight.
class RevisedWeights {
 public:
  RevisedWeights() = default;
  RevisedWeights(const WeightingGraph& design_graph, const Adaptation& adaptation);
  // From a table already made by normalized_closure.
  RevisedWeights(IndexSet selected, ClosureWeights normalized)
      : selected_(selected), table_(std::move(normalized)) {}

  // Full-length weight vector for J & I_2.
  std::span<const double> of(IndexSet J) const { return table_.of(J & selected_); }
  IndexSet selected() const { return selected_; }

 private:
  IndexSet selected_;
  ClosureWeights table_;
};

// Closure weights of every set rescaled to sum to one (sets whose closure
// weights are all zero stay zero).
ClosureWeights normalized_closure(const WeightingGraph& graph);

// Partition of the sets still open after stage one.
struct JPlusPartition {
  std::vector<IndexSet> A;  // subsets of I_2
  std::vector<IndexSet> B;  // subsets of I_1* \ I_2
  std::vector<IndexSet> C;  // the rest
};

enum class JGroup { Rejected, A, B, C };
const char* to_string(JGroup g);

// Elementary hypotheses every one of whose sets was rejected.
IndexSet early_rejected(IndexSet universe, std::span<const IndexSet> rejected_sets);

// Throws ValidationError unless I_2 is a subset of I_1 minus the early rejections.
JPlusPartition partition_jplus(IndexSet i1, IndexSet i2, std::span<const IndexSet> rejected_sets);

inline JGroup classify(IndexSet J, IndexSet i2) {
  if (J.is_subset_of(i2)) return JGroup::A;
  if ((J & i2).empty()) return JGroup::B;
  return JGroup::C;
}

}  // namespace adaptmt
