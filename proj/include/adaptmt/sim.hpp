#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adaptmt/cer.hpp"
#include "adaptmt/combo.hpp"

namespace adaptmt::sim {

// Treatment arms a = 0..m-1 compared with a shared control. Hypothesis a is
// the primary endpoint of arm a, hypothesis m + a its secondary endpoint.
struct Scenario {
  std::string label;
  std::vector<double> effects;  // primary effect per arm in units of sigma; secondary uses the same
  double sigma = 1.0;
  double rho = 0.5;  // within-subject correlation of the two endpoints
  int arms() const { return static_cast<int>(effects.size()); }
};

enum class DroppingRule { Conservative, Normal, Aggressive, UltraAggressive };
const char* to_string(DroppingRule r);
// Accepts the display names plus "Moderate" for Normal; case-insensitive,
// spaces and underscores ignored.
DroppingRule parse_dropping_rule(const std::string& s);

enum class Method { Cer, Combo };
const char* to_string(Method m);
Method parse_method(const std::string& s);

enum class AllDroppedPolicy { RetainBest, StopTrial };

struct SimulationConfig {
  Scenario scenario;
  DroppingRule rule = DroppingRule::Conservative;
  int n_per_arm = 100;
  double interim_fraction = 0.5;
  double alpha = 0.025;
  std::vector<Method> methods{Method::Cer, Method::Combo};
  std::int64_t combo_replicates = 20000;
  std::int64_t cer_stage1_replicates = 4000;
  int cer_stage2_replicates = 50;
  std::uint64_t seed = 20240601;
  int threads = 1;
  AllDroppedPolicy all_dropped = AllDroppedPolicy::RetainBest;

  void validate() const;
};

// Independent stream per (seed, replicate, stream); results therefore do not
// depend on how replicates are scheduled across threads.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

// Group sizes: index 0 is control, 1..m the arms; a zero size means the arm
// takes no part and its p-values are 1.
struct StagePValues {
  std::vector<double> p;  // 2m one-sided pooled-variance t-test p-values
};
StagePValues simulate_stage_data(const Scenario& scenario, std::span<const int> sizes, std::mt19937_64& rng);

// One-sided p-value of the pooled-variance two-sample t-test (treatment
// greater than control) from group moments.
double pooled_t_pvalue(double mean_t, double ss_t, int n_t, double mean_c, double ss_c, int n_c);

struct Reallocation {
  std::vector<bool> continuing;  // per arm
  std::vector<int> sizes;        // stage-two sizes, control first
};

// primary_p: stage-one primary p-value per arm. candidates: arms that still
// have an open hypothesis. planned: stage-two size per group. Freed subjects
// are spread evenly over the continuing arms and control, remainder to
// control first and then arms in order.
Reallocation apply_dropping_rule(DroppingRule rule, std::span<const double> primary_p, const std::vector<bool>& candidates,
                                 int planned, AllDroppedPolicy policy = AllDroppedPolicy::RetainBest);

// Mean of clustered binary outcomes (equal-sized clusters) with a
// between-cluster standard error. Integer sums keep merging order-free.
class NestedEstimator {
 public:
  void add_cluster(std::int64_t successes, std::int64_t draws);
  void merge(const NestedEstimator& other);
  double mean() const;
  double standard_error() const;
  std::int64_t clusters() const { return clusters_; }

 private:
  std::int64_t clusters_ = 0;
  std::int64_t draws_per_cluster_ = 0;
  std::int64_t successes_ = 0;
  std::int64_t successes_sq_ = 0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct PowerReport {
  Method method = Method::Cer;
  std::string scenario;
  DroppingRule rule = DroppingRule::Conservative;
  double rho = 0.0;
  std::int64_t clusters = 0;
  std::int64_t draws = 0;
  std::optional<Estimate> disjunctive;  // absent when no hypothesis is false
  std::optional<Estimate> conjunctive;
  std::optional<Estimate> fwer;         // absent when no hypothesis is true
  std::vector<Estimate> rejection_rate;  // per hypothesis
};

// Pre-planned designs of both methods for m arms with the generalised
// four-arm graph (equal primary weights, 3/4 passed to the own secondary,
// the rest shared by the other primaries; secondaries pass to the other
// primaries). Plans are memoised, so share one across studies.
class StudyDesign {
 public:
  StudyDesign(int arms, int n_per_arm, double interim_fraction, double alpha);
  int arms() const { return arms_; }
  int hypotheses() const { return 2 * arms_; }
  int stage1_size() const { return n1_; }
  int stage2_size() const { return n2_; }
  const ComboEngine& combo() const { return *combo_; }
  const CerEngine& cer() const { return *cer_; }
  const WeightingGraph& graph() const { return combo_->design().graph; }
  // Closure weights rescaled to one; stage-two weights of J & I_2.
  const ClosureWeights& normalized() const { return normalized_; }

  bool matches(const SimulationConfig& cfg) const;

 private:
  int arms_;
  int n_per_arm_;
  int n1_;
  int n2_;
  double t_;
  double alpha_;
  std::shared_ptr<ComboEngine> combo_;
  std::shared_ptr<CerEngine> cer_;
  ClosureWeights normalized_;
};

WeightingGraph multi_arm_graph(int arms);
// Primary block and secondary block, each with many-to-one correlation.
CorrelationKnowledge multi_arm_knowledge(int arms, std::span<const int> sizes);

// One report per configured method. A matching shared design avoids
// re-planning.
std::vector<PowerReport> run_study(const SimulationConfig& config, const StudyDesign* shared = nullptr);

// Rows: scenario,rule,rho,method,disjunctive,disjunctive_se,conjunctive,
// conjunctive_se,fwer,fwer_se,clusters,draws. Percentages; n/a when absent.
void write_power_csv(std::ostream& out, std::span<const PowerReport> reports);

}  // namespace adaptmt::sim
