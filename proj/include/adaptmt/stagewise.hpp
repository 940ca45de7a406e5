#pragma once

#include <span>
#include <string>
#include <vector>

#include "adaptmt/index_set.hpp"
#include "adaptmt/mvn.hpp"

namespace adaptmt {

enum class TestType { NA, Nonparametric, Parametric, Mixed };
const char* to_string(TestType type);

// A set of hypotheses whose test statistics have known joint correlation.
// corr is ordered by ascending member index.
struct CorrelationBlock {
  IndexSet members;
  CorrelationMatrix corr;
};

// Partition of {0..k-1} into blocks of known correlation; correlations across
// blocks are unknown. Indices not named in any block become singletons.
class CorrelationKnowledge {
 public:
  CorrelationKnowledge() = default;
  CorrelationKnowledge(int k, std::vector<CorrelationBlock> blocks);
  static CorrelationKnowledge unknown(int k);

  int size() const { return k_; }
  const std::vector<CorrelationBlock>& blocks() const { return blocks_; }
  int block_of(int j) const { return block_of_[j]; }

 private:
  int k_ = 0;
  std::vector<CorrelationBlock> blocks_;
  std::vector<int> block_of_;
};

// Blocks J_h intersected with J, empty ones dropped.
std::vector<CorrelationBlock> restrict_blocks(const CorrelationKnowledge& knowledge, IndexSet J);

// The positive-weight members of J grouped by correlation block.
struct WeightedBlock {
  IndexSet members;
  std::vector<double> weights;  // ascending member order
  CorrelationMatrix corr;
  double weight_sum() const;
};

struct WeightedPartition {
  std::vector<WeightedBlock> blocks;
  TestType type = TestType::NA;
};

// w is a full-length vector indexed by hypothesis. Zero-weight members are
// dropped before classification; one surviving member is type NA.
WeightedPartition partition_weighted(const CorrelationKnowledge& knowledge, IndexSet J, std::span<const double> w);

// min(1, min_j p_j / w_j) over w_j > 0; 1 when every weight is zero.
double adjusted_p_nonparam(std::span<const double> p, std::span<const double> w);

// P(min_j P_j / w_j <= observed min) for jointly normal z statistics with the
// given correlation among the positive-weight members.
double adjusted_p_param(std::span<const double> p, std::span<const double> w, const CorrelationMatrix& corr,
                        MvnOptions opt = {});

// Blocks index into p and w by position.
struct LocalBlock {
  std::vector<std::size_t> index;
  CorrelationMatrix corr;
};
double adjusted_p_mixed(std::span<const double> p, std::span<const double> w, std::span<const LocalBlock> blocks,
                        MvnOptions opt = {});

struct AdjustedP {
  double value = 1.0;
  TestType type = TestType::NA;
};

// Adjusted p-value of H_J from full-length p and w vectors. A single block
// uses the parametric value as is; several blocks use the mixed formula.
AdjustedP adjusted_p(const WeightedPartition& partition, std::span<const double> p, MvnOptions opt = {});
AdjustedP adjusted_p(const CorrelationKnowledge& knowledge, IndexSet J, std::span<const double> p,
                     std::span<const double> w, MvnOptions opt = {});

}  // namespace adaptmt
