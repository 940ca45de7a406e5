#include "adaptmt/adaptation.hpp"

#include <algorithm>

#include "adaptmt/error.hpp"

namespace adaptmt {

ClosureWeights normalized_closure(const WeightingGraph& graph) {
  const ClosureWeights raw = closure_weights(graph);
  const int k = graph.size();
  std::vector<double> table((static_cast<std::size_t>(1) << k) * k, 0.0);
  for (IndexSet J : nonempty_subsets(IndexSet::full(k))) {
    auto w = raw.of(J);
    double sum = 0.0;
    for (int j : J) sum += w[j];
    for (int j : J) table[static_cast<std::size_t>(J.bits()) * k + j] = sum > 0.0 ? w[j] / sum : 0.0;
  }
  return ClosureWeights(k, std::move(table));
}

RevisedWeights::RevisedWeights(const WeightingGraph& design_graph, const Adaptation& adaptation)
    : selected_(adaptation.selected) {
  const WeightingGraph& g = adaptation.graph ? *adaptation.graph : design_graph;
  if (g.size() != design_graph.size()) throw ValidationError("revised graph must keep the original hypothesis count");
  if (!selected_.is_subset_of(IndexSet::full(g.size()))) throw ValidationError("selected set out of range");
  table_ = normalized_closure(g);
}

const char* to_string(JGroup g) {
  switch (g) {
    case JGroup::Rejected: return "rejected";
    case JGroup::A: return "A";
    case JGroup::B: return "B";
    case JGroup::C: return "C";
  }
  return "?";
}

IndexSet early_rejected(IndexSet universe, std::span<const IndexSet> rejected_sets) {
  std::vector<char> rej(static_cast<std::size_t>(universe.bits()) + 1, 0);
  for (IndexSet J : rejected_sets)
    if (J.is_subset_of(universe)) rej[J.bits()] = 1;
  IndexSet out;
  for (int i : universe) {
    bool all = true;
    for (IndexSet J : nonempty_subsets(universe)) {
      if (J.contains(i) && !rej[J.bits()]) {
        all = false;
        break;
      }
    }
    if (all) out = out.with(i);
  }
  return out;
}

JPlusPartition partition_jplus(IndexSet i1, IndexSet i2, std::span<const IndexSet> rejected_sets) {
  const IndexSet i1r = early_rejected(i1, rejected_sets);
  if (!i2.is_subset_of(i1 - i1r))
    throw ValidationError("selected set " + i2.to_string() + " must lie within the hypotheses not rejected at stage one " +
                          (i1 - i1r).to_string());
  std::vector<char> rej(static_cast<std::size_t>(i1.bits()) + 1, 0);
  for (IndexSet J : rejected_sets)
    if (J.is_subset_of(i1)) rej[J.bits()] = 1;
  JPlusPartition part;
  for (IndexSet J : nonempty_subsets(i1)) {
    if (rej[J.bits()]) continue;
    switch (classify(J, i2)) {
      case JGroup::A: part.A.push_back(J); break;
      case JGroup::B: part.B.push_back(J); break;
      default: part.C.push_back(J); break;
    }
  }
  return part;
}

}  // namespace adaptmt
