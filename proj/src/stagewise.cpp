#include "adaptmt/stagewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adaptmt/error.hpp"
#include "adaptmt/normal.hpp"

namespace adaptmt {
namespace {

void check_p(std::span<const double> p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("p-values must lie in [0, 1]");
}

// Union probability for one block at common weighted level m: each member
// crosses Phi^{-1}(1 - w_j m).
double block_union(std::span<const double> w, const CorrelationMatrix& corr, double m, const MvnOptions& opt) {
  if (m <= 0.0) return 0.0;
  std::vector<double> z(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double q = w[j] * m;
    if (q >= 1.0) return 1.0;
    z[j] = std_normal_quantile_upper(q);
  }
  return std::min(1.0, mvn_upper_orthant_union(z, corr, opt).value);
}

}  // namespace

const char* to_string(TestType type) {
  switch (type) {
    case TestType::NA: return "NA";
    case TestType::Nonparametric: return "Nonparametric";
    case TestType::Parametric: return "Parametric";
    case TestType::Mixed: return "Mixed";
  }
  return "?";
}

CorrelationKnowledge::CorrelationKnowledge(int k, std::vector<CorrelationBlock> blocks) : k_(k), block_of_(k, -1) {
  if (k < 1 || k > kMaxHypotheses) throw ValidationError("correlation knowledge: bad hypothesis count");
  for (auto& b : blocks) {
    if (b.members.empty()) throw ValidationError("correlation knowledge: empty block");
    if (!b.members.is_subset_of(IndexSet::full(k)))
      throw ValidationError("correlation knowledge: block " + b.members.to_string() + " out of range");
    if (static_cast<int>(b.corr.size()) != b.members.size())
      throw ValidationError("correlation knowledge: block " + b.members.to_string() + " matrix size mismatch");
    const int id = static_cast<int>(blocks_.size());
    for (int j : b.members) {
      if (block_of_[j] >= 0)
        throw ValidationError("correlation knowledge: H" + std::to_string(j + 1) + " appears in two blocks");
      block_of_[j] = id;
    }
    blocks_.push_back(std::move(b));
  }
  for (int j = 0; j < k; ++j) {
    if (block_of_[j] >= 0) continue;
    block_of_[j] = static_cast<int>(blocks_.size());
    blocks_.push_back({IndexSet::single(j), CorrelationMatrix::identity(1)});
  }
}

CorrelationKnowledge CorrelationKnowledge::unknown(int k) { return CorrelationKnowledge(k, {}); }

std::vector<CorrelationBlock> restrict_blocks(const CorrelationKnowledge& knowledge, IndexSet J) {
  std::vector<CorrelationBlock> out;
  for (const auto& b : knowledge.blocks()) {
    const IndexSet part = b.members & J;
    if (part.empty()) continue;
    std::vector<std::size_t> idx;
    std::size_t pos = 0;
    for (int j : b.members) {
      if (part.contains(j)) idx.push_back(pos);
      ++pos;
    }
    out.push_back({part, b.corr.sub(idx)});
  }
  return out;
}

double WeightedBlock::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

WeightedPartition partition_weighted(const CorrelationKnowledge& knowledge, IndexSet J, std::span<const double> w) {
  if (static_cast<int>(w.size()) != knowledge.size()) throw ValidationError("weight vector length mismatch");
  IndexSet positive;
  for (int j : J)
    if (w[j] > 0.0) positive = positive.with(j);
  WeightedPartition part;
  for (auto& b : restrict_blocks(knowledge, positive)) {
    WeightedBlock wb{b.members, {}, std::move(b.corr)};
    for (int j : wb.members) wb.weights.push_back(w[j]);
    part.blocks.push_back(std::move(wb));
  }
  if (positive.size() <= 1) {
    part.type = TestType::NA;
  } else if (part.blocks.size() == 1) {
    part.type = TestType::Parametric;
  } else if (static_cast<int>(part.blocks.size()) == positive.size()) {
    part.type = TestType::Nonparametric;
  } else {
    part.type = TestType::Mixed;
  }
  return part;
}

double adjusted_p_nonparam(std::span<const double> p, std::span<const double> w) {
  if (p.size() != w.size()) throw ValidationError("adjusted_p_nonparam: length mismatch");
  check_p(p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.size(); ++j)
    if (w[j] > 0.0) best = std::min(best, p[j] / w[j]);
  return std::min(1.0, best);
}

double adjusted_p_param(std::span<const double> p, std::span<const double> w, const CorrelationMatrix& corr,
                        MvnOptions opt) {
  if (p.size() != w.size()) throw ValidationError("adjusted_p_param: length mismatch");
  check_p(p);
  std::vector<std::size_t> keep;
  std::vector<double> wk;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(w[j] > 0.0)) continue;
    keep.push_back(j);
    wk.push_back(w[j]);
    m = std::min(m, p[j] / w[j]);
  }
  if (keep.empty()) return 1.0;
  if (corr.size() == p.size()) return block_union(wk, corr.sub(keep), m, opt);
  if (corr.size() == keep.size()) return block_union(wk, corr, m, opt);
  throw ValidationError("adjusted_p_param: correlation matrix size mismatch");
}

double adjusted_p_mixed(std::span<const double> p, std::span<const double> w, std::span<const LocalBlock> blocks,
                        MvnOptions opt) {
  if (p.size() != w.size()) throw ValidationError("adjusted_p_mixed: length mismatch");
  double best = 1.0;
  for (const auto& b : blocks) {
    std::vector<double> pb, wb;
    double total = 0.0;
    for (std::size_t i : b.index) {
      if (i >= p.size()) throw ValidationError("adjusted_p_mixed: block index out of range");
      pb.push_back(p[i]);
      wb.push_back(w[i]);
      if (w[i] > 0.0) total += w[i];
    }
    if (total <= 0.0) continue;
    best = std::min(best, adjusted_p_param(pb, wb, b.corr, opt) / total);
  }
  return std::min(1.0, best);
}

AdjustedP adjusted_p(const WeightedPartition& partition, std::span<const double> p, MvnOptions opt) {
  if (partition.blocks.empty()) return {1.0, partition.type};
  auto block_p = [&](const WeightedBlock& b) {
    std::vector<double> pb;
    for (int j : b.members) pb.push_back(p[j]);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pb.size(); ++i) m = std::min(m, pb[i] / b.weights[i]);
    if (pb.size() == 1) return std::min(1.0, b.weights[0] * m);
    return block_union(b.weights, b.corr, m, opt);
  };
  check_p(p);
  if (partition.blocks.size() == 1) {
    const auto& b = partition.blocks.front();
    // One member: plain weighted p; one block: the parametric value itself.
    if (b.members.size() == 1) return {std::min(1.0, p[b.members.min()] / b.weights[0]), partition.type};
    return {block_p(b), partition.type};
  }
  double best = 1.0;
  for (const auto& b : partition.blocks) best = std::min(best, block_p(b) / b.weight_sum());
  return {std::min(1.0, best), partition.type};
}

AdjustedP adjusted_p(const CorrelationKnowledge& knowledge, IndexSet J, std::span<const double> p,
                     std::span<const double> w, MvnOptions opt) {
  if (static_cast<int>(p.size()) != knowledge.size()) throw ValidationError("p-value vector length mismatch");
  return adjusted_p(partition_weighted(knowledge, J, w), p, opt);
}

}  // namespace adaptmt
