#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace adaptmt {

// Symmetric, unit-diagonal, positive semi-definite correlation matrix.
// When the matrix has one-factor structure (r_ij = l_i * l_j, |l_i| < 1) the
// loadings are kept; orthant probabilities then reduce to 1-D quadrature.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  static CorrelationMatrix identity(std::size_t d);
  // Throws ValidationError on a bad shape, diagonal, range, asymmetry or
  // failed PSD check.
  static CorrelationMatrix from_rows(std::size_t d, std::vector<double> row_major);
  static CorrelationMatrix equicorrelated(std::size_t d, double r);
  static CorrelationMatrix one_factor(std::vector<double> loadings);

  std::size_t size() const { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return r_[i * d_ + j]; }
  const std::vector<double>& values() const { return r_; }
  const std::optional<std::vector<double>>& loadings() const { return loadings_; }
  bool is_diagonal() const;

  CorrelationMatrix sub(std::span<const std::size_t> idx) const;

  friend bool operator==(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    return a.d_ == b.d_ && a.r_ == b.r_;
  }

 private:
  void detect_factor();

  std::size_t d_ = 0;
  std::vector<double> r_;
  std::optional<std::vector<double>> loadings_;
};

// corr(Z_i, Z_j) for treatment-vs-shared-control z statistics.
CorrelationMatrix many_to_one_correlation(std::span<const double> n_treat, double n_control);

struct ProbResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

struct MvnOptions {
  // Compute an error estimate. Hot loops that only need the value turn this
  // off; for quadrature paths that halves the work.
  bool estimate_error = true;
  double abs_tol = 1e-6;
  // Skip the closed-form and one-factor paths (cross-checks use this).
  bool force_lattice = false;
};

// P(lower <= Z <= upper), Z ~ N(0, corr). Infinite bounds are allowed.
ProbResult mvn_rectangle(std::span<const double> lower, std::span<const double> upper,
                         const CorrelationMatrix& corr, MvnOptions opt = {});

// P(Z_j >= b_j for some j).
ProbResult mvn_upper_orthant_union(std::span<const double> thresholds, const CorrelationMatrix& corr,
                                   MvnOptions opt = {});

// P(Z_j1 >= a_j or Z_j2 >= b_j for some j) where Z_1 ~ N(0, corr),
// Z_2 = sqrt(t) Z_1 + sqrt(1-t) Z_inc and Z_inc ~ N(0, corr) independent of Z_1.
// The stage-wise union of a two-look design.
ProbResult mvn_two_stage_union(std::span<const double> a, std::span<const double> b, const CorrelationMatrix& corr,
                               double t, MvnOptions opt = {});

// Probabilists' Gauss-Hermite rule: sum_k w_k f(x_k) ~ E f(Z).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(int n);

}  // namespace adaptmt
