#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adaptmt/index_set.hpp"

namespace adaptmt {

// Nodal weights plus a row-major transition matrix. Removed nodes keep their
// index; their weight and incident edges are zero.
class WeightingGraph {
 public:
  WeightingGraph(std::vector<double> weights, std::vector<double> transition,
                 std::vector<std::string> names = {});

  int size() const { return k_; }
  double weight(int j) const { return weights_[j]; }
  double edge(int from, int to) const { return transition_[from * k_ + to]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> transition() const { return transition_; }
  const std::vector<std::string>& names() const { return names_; }
  IndexSet live() const { return live_; }

  // Algorithm-1 update: passes w_j along outgoing edges and reconnects the
  // edges that ran through j. Throws ValidationError if j is not live.
  WeightingGraph without_node(int j) const;

  bool operator==(const WeightingGraph&) const = default;

 private:
  int k_;
  std::vector<double> weights_;
  std::vector<double> transition_;
  std::vector<std::string> names_;
  IndexSet live_;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

inline constexpr double kGraphTolerance = 1e-12;

ValidationReport validate_graph(const WeightingGraph& graph);

inline WeightingGraph remove_node(const WeightingGraph& graph, int j) { return graph.without_node(j); }

// Weights w_{j,J} for every non-empty J, extracted by removing the nodes of
// I \ J in ascending order.
class ClosureWeights {
 public:
  ClosureWeights() = default;
  ClosureWeights(int k, std::vector<double> table) : k_(k), table_(std::move(table)) {}

  int size() const { return k_; }
  // Full-length (k) weight vector for J; entries outside J are zero.
  std::span<const double> of(IndexSet J) const {
    return {table_.data() + static_cast<std::size_t>(J.bits()) * k_, static_cast<std::size_t>(k_)};
  }
  double weight(IndexSet J, int j) const { return table_[static_cast<std::size_t>(J.bits()) * k_ + j]; }

  // CSV with header "set,member,weight"; one row per (J, j in J).
  void write_csv(std::ostream& out) const;

 private:
  int k_ = 0;
  std::vector<double> table_;
};

// Throws ValidationError for an invalid graph or k > kMaxHypotheses.
ClosureWeights closure_weights(const WeightingGraph& graph);

// Convenience used by tests and the CLI: graph after removing every node not in J.
WeightingGraph reduce_to(const WeightingGraph& graph, IndexSet J);

}  // namespace adaptmt
