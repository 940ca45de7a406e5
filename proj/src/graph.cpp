#include "adaptmt/graph.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "adaptmt/error.hpp"

namespace adaptmt {

WeightingGraph::WeightingGraph(std::vector<double> weights, std::vector<double> transition,
                               std::vector<std::string> names)
    : k_(static_cast<int>(weights.size())),
      weights_(std::move(weights)),
      transition_(std::move(transition)),
      names_(std::move(names)) {
  if (k_ < 1) throw ValidationError("graph must have at least one hypothesis");
  if (k_ > 31) throw ValidationError("graph has too many hypotheses");
  if (transition_.size() != static_cast<std::size_t>(k_) * k_) {
    throw ValidationError("transition matrix must be " + std::to_string(k_) + "x" + std::to_string(k_));
  }
  if (names_.empty()) {
    for (int j = 0; j < k_; ++j) names_.push_back("H" + std::to_string(j + 1));
  } else if (static_cast<int>(names_.size()) != k_) {
    throw ValidationError("hypothesis names do not match the weight vector length");
  }
  live_ = IndexSet::full(k_);
}

WeightingGraph WeightingGraph::without_node(int j) const {
  if (j < 0 || j >= k_ || !live_.contains(j)) {
    throw ValidationError("node " + std::to_string(j + 1) + " is not in the graph");
  }
  WeightingGraph out = *this;
  out.live_ = live_.without(j);
  const double wj = weights_[j];
  for (int l : out.live_) out.weights_[l] = weights_[l] + wj * edge(j, l);
  out.weights_[j] = 0.0;

  for (int l : out.live_) {
    const double glj = edge(l, j);
    const double gjl = edge(j, l);
    const double denom = 1.0 - glj * gjl;
    for (int m : out.live_) {
      double& g = out.transition_[l * k_ + m];
      if (l == m || !(glj * gjl < 1.0)) {
        g = 0.0;
      } else {
        g = (edge(l, m) + glj * edge(j, m)) / denom;
      }
    }
  }
  for (int m = 0; m < k_; ++m) {
    out.transition_[j * k_ + m] = 0.0;
    out.transition_[m * k_ + j] = 0.0;
  }
  return out;
}

ValidationReport validate_graph(const WeightingGraph& graph) {
  ValidationReport report;
  const int k = graph.size();
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const double w = graph.weight(j);
    if (!std::isfinite(w) || w < -kGraphTolerance) {
      report.errors.push_back("negative weight at " + graph.names()[j]);
    }
    total += w;
  }
  if (total > 1.0 + kGraphTolerance) {
    std::ostringstream msg;
    msg << "weights sum to " << total << " > 1";
    report.errors.push_back(msg.str());
  } else if (total < 1.0 - kGraphTolerance) {
    std::ostringstream msg;
    msg << "weights sum to " << total << " < 1; the tests will not exhaust alpha";
    report.warnings.push_back(msg.str());
  }
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      const double g = graph.edge(i, j);
      if (!std::isfinite(g) || g < -kGraphTolerance || g > 1.0 + kGraphTolerance) {
        report.errors.push_back("edge " + graph.names()[i] + "->" + graph.names()[j] + " outside [0,1]");
      }
      row += g;
    }
    if (std::abs(graph.edge(i, i)) > kGraphTolerance) {
      report.errors.push_back("nonzero diagonal at " + graph.names()[i]);
    }
    if (row > 1.0 + kGraphTolerance) {
      std::ostringstream msg;
      msg << "row sum of " << graph.names()[i] << " is " << row << " > 1";
      report.errors.push_back(msg.str());
    }
  }
  return report;
}

namespace {

// Depth-first removal in ascending index order: every set is reached exactly
// once and always by the canonical removal sequence.
void fill_closure(const WeightingGraph& g, IndexSet current, int next, int k, std::vector<double>& table) {
  for (int j = next; j < k; ++j) {
    if (!current.contains(j)) continue;
    const IndexSet child = current.without(j);
    if (child.empty()) continue;
    const WeightingGraph reduced = g.without_node(j);
    double* row = table.data() + static_cast<std::size_t>(child.bits()) * k;
    for (int m : child) row[m] = reduced.weight(m);
    fill_closure(reduced, child, j + 1, k, table);
  }
}

}  // namespace

ClosureWeights closure_weights(const WeightingGraph& graph) {
  const int k = graph.size();
  if (k > kMaxHypotheses) {
    throw ValidationError("closure too large: " + std::to_string(k) + " hypotheses (maximum " +
                          std::to_string(kMaxHypotheses) + ")");
  }
  const ValidationReport report = validate_graph(graph);
  if (!report.ok()) throw ValidationError("invalid graph: " + report.errors.front());

  std::vector<double> table((std::size_t{1} << k) * k, 0.0);
  const IndexSet all = IndexSet::full(k);
  double* top = table.data() + static_cast<std::size_t>(all.bits()) * k;
  for (int j = 0; j < k; ++j) top[j] = graph.weight(j);
  fill_closure(graph, all, 0, k, table);
  return ClosureWeights(k, std::move(table));
}

WeightingGraph reduce_to(const WeightingGraph& graph, IndexSet J) {
  WeightingGraph g = graph;
  for (int j : graph.live() - J) g = g.without_node(j);
  return g;
}

void ClosureWeights::write_csv(std::ostream& out) const {
  out << "set,member,weight\n";
  const auto prev = out.precision(17);
  for (IndexSet J : nonempty_subsets(IndexSet::full(k_))) {
    for (int j : J) out << '"' << J.to_string() << "\"," << (j + 1) << ',' << weight(J, j) << '\n';
  }
  out.precision(prev);
}

}  // namespace adaptmt
