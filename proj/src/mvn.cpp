#include "adaptmt/mvn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

#include "adaptmt/error.hpp"
#include "adaptmt/kernels/kernels.hpp"
#include "adaptmt/normal.hpp"

namespace adaptmt {
namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;
// Above this slope |l|/sqrt(1-l^2) the Hermite rule loses accuracy and the
// one-factor integral switches to adaptive Gauss-Kronrod.
constexpr double kMaxHermiteSlope = 1.25;
constexpr int kHermiteN = 64;
constexpr int kHermiteCheckN = 48;
constexpr int kHermite2N = 32;
constexpr int kHermite2CheckN = 24;

bool is_pos_inf(double x) { return x == std::numeric_limits<double>::infinity(); }
bool is_neg_inf(double x) { return x == -std::numeric_limits<double>::infinity(); }

double max_slope(const std::vector<double>& lam) {
  double m = 0.0;
  for (double l : lam) m = std::max(m, std::abs(l) / std::sqrt(1.0 - l * l));
  return m;
}

// ---- one-factor quadrature ----------------------------------------------

// E[ prod_j (Phi((hi_j - l_j X)/s_j) - Phi((lo_j - l_j X)/s_j)) ] with X ~ N(0,1).
class FactorIntegrand {
 public:
  FactorIntegrand(std::span<const double> lo, std::span<const double> hi, const std::vector<double>& lam) {
    for (std::size_t j = 0; j < lam.size(); ++j) {
      const bool free_lo = is_neg_inf(lo[j]);
      const bool free_hi = is_pos_inf(hi[j]);
      if (free_lo && free_hi) continue;
      const double s = std::sqrt(1.0 - lam[j] * lam[j]);
      if (free_lo) {
        off_hi_.push_back(hi[j] / s);
        slope_hi_.push_back(-lam[j] / s);
      } else if (free_hi) {
        // 1 - Phi(u) = Phi(-u)
        off_hi_.push_back(-lo[j] / s);
        slope_hi_.push_back(lam[j] / s);
      } else {
        two_lo_.push_back(lo[j] / s);
        two_hi_.push_back(hi[j] / s);
        two_slope_.push_back(-lam[j] / s);
      }
    }
  }

  double value_at(double x) const {
    double p = 1.0;
    for (std::size_t j = 0; j < off_hi_.size(); ++j) p *= std_normal_cdf(off_hi_[j] + slope_hi_[j] * x);
    for (std::size_t j = 0; j < two_lo_.size(); ++j) {
      p *= std_normal_cdf(two_hi_[j] + two_slope_[j] * x) - std_normal_cdf(two_lo_[j] + two_slope_[j] * x);
    }
    return p;
  }

  double hermite(const HermiteRule& rule) const {
    if (two_lo_.empty()) return kernels::factor_product_sum(rule.nodes, rule.weights, off_hi_, slope_hi_);
    double total = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) total += rule.weights[k] * value_at(rule.nodes[k]);
    return total;
  }

  ProbResult adaptive() const {
    const double inv_sqrt_2pi = 0.3989422804014327;
    auto f = [&](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x) * value_at(x); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -9.5, 9.5, 25, 1e-13, &err);
    return {v, err + 1e-15};
  }

 private:
  std::vector<double> off_hi_, slope_hi_;
  std::vector<double> two_lo_, two_hi_, two_slope_;
};

ProbResult factor_rectangle(std::span<const double> lo, std::span<const double> hi, const std::vector<double>& lam,
                            const MvnOptions& opt) {
  FactorIntegrand g(lo, hi, lam);
  if (max_slope(lam) > kMaxHermiteSlope) return g.adaptive();
  const double v = g.hermite(hermite_rule(kHermiteN));
  double err = 0.0;
  if (opt.estimate_error) err = std::abs(v - g.hermite(hermite_rule(kHermiteCheckN)));
  return {std::clamp(v, 0.0, 1.0), err + 1e-15};
}

// ---- lattice quasi-Monte Carlo (separation of variables) ------------------

constexpr std::array<int, 40> kPrimes = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,
                                         47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107,
                                         109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};

struct Prepared {
  std::size_t d = 0;
  std::vector<double> L;  // lower-triangular, row-major d x d
  std::vector<double> a, b;
};

// Cholesky with Genz's variable prioritisation: at each step pick the
// variable whose conditional interval is least likely. Zero pivots mark
// variables that are linear in the earlier ones.
Prepared prepare(std::span<const double> lower, std::span<const double> upper, const CorrelationMatrix& corr) {
  const std::size_t d = corr.size();
  Prepared p;
  p.d = d;
  p.L.assign(d * d, 0.0);
  p.a.assign(lower.begin(), lower.end());
  p.b.assign(upper.begin(), upper.end());
  std::vector<double> c = corr.values();
  std::vector<double> y(d, 0.0);
  auto L = [&](std::size_t i, std::size_t j) -> double& { return p.L[i * d + j]; };

  for (std::size_t i = 0; i < d; ++i) {
    std::size_t best = i;
    double best_p = 2.0;
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      double var = c[j * d + j];
      for (std::size_t k = 0; k < i; ++k) {
        s += L(j, k) * y[k];
        var -= L(j, k) * L(j, k);
      }
      double pr = 1.0;
      if (var > kPsdTol) {
        const double den = std::sqrt(var);
        pr = std_normal_cdf((p.b[j] - s) / den) - std_normal_cdf((p.a[j] - s) / den);
      }
      if (pr < best_p) {
        best_p = pr;
        best = j;
      }
    }
    if (best != i) {
      std::swap(p.a[i], p.a[best]);
      std::swap(p.b[i], p.b[best]);
      for (std::size_t k = 0; k < d; ++k) std::swap(c[i * d + k], c[best * d + k]);
      for (std::size_t k = 0; k < d; ++k) std::swap(c[k * d + i], c[k * d + best]);
      for (std::size_t k = 0; k < i; ++k) std::swap(L(i, k), L(best, k));
    }
    double var = c[i * d + i];
    for (std::size_t k = 0; k < i; ++k) var -= L(i, k) * L(i, k);
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += L(i, k) * y[k];
    if (var > kPsdTol) {
      const double lii = std::sqrt(var);
      L(i, i) = lii;
      for (std::size_t j = i + 1; j < d; ++j) {
        double v = c[j * d + i];
        for (std::size_t k = 0; k < i; ++k) v -= L(j, k) * L(i, k);
        L(j, i) = v / lii;
      }
      const double ta = (p.a[i] - s) / lii;
      const double tb = (p.b[i] - s) / lii;
      const double mass = std_normal_cdf(tb) - std_normal_cdf(ta);
      const double pa = std::isinf(ta) ? 0.0 : std_normal_pdf(ta);
      const double pb = std::isinf(tb) ? 0.0 : std_normal_pdf(tb);
      if (mass > 1e-300) {
        y[i] = (pa - pb) / mass;
      } else {
        y[i] = std::isinf(ta) ? tb : (std::isinf(tb) ? ta : 0.5 * (ta + tb));
      }
    } else {
      L(i, i) = 0.0;
      y[i] = 0.0;
    }
  }
  return p;
}

double integrand(const Prepared& p, const double* w, double* y) {
  const std::size_t d = p.d;
  double f = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += p.L[i * d + k] * y[k];
    const double lii = p.L[i * d + i];
    if (lii > 0.0) {
      const double lo = std_normal_cdf((p.a[i] - s) / lii);
      const double hi = std_normal_cdf((p.b[i] - s) / lii);
      f *= hi - lo;
      if (f <= 0.0) return 0.0;
      if (i + 1 < d) {
        const double u = std::clamp(lo + w[i] * (hi - lo), 1e-300, 1.0 - 1e-16);
        y[i] = std_normal_quantile(u);
      }
    } else {
      if (s < p.a[i] || s > p.b[i]) return 0.0;
      y[i] = 0.0;
    }
  }
  return f;
}

ProbResult lattice_rectangle(std::span<const double> lower, std::span<const double> upper,
                             const CorrelationMatrix& corr, const MvnOptions& opt) {
  const Prepared p = prepare(lower, upper, corr);
  const std::size_t d = p.d;
  const std::size_t dims = d > 1 ? d - 1 : 1;
  if (dims > kPrimes.size()) throw NumericalError("lattice rule supports at most 41 dimensions");
  std::vector<double> q(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    const double r = std::sqrt(static_cast<double>(kPrimes[i]));
    q[i] = r - std::floor(r);
  }
  constexpr int kShifts = 12;
  std::mt19937_64 rng(0x9E3779B97F4A7C15ULL);
  std::vector<double> shifts(kShifts * dims);
  for (double& s : shifts) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  std::vector<double> w(dims), wa(dims), y(d);
  double value = 0.0;
  double err = 1.0;
  for (std::size_t n = 1 << 9; n <= (std::size_t{1} << 17); n <<= 1) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int m = 0; m < kShifts; ++m) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        for (std::size_t i = 0; i < dims; ++i) {
          double x = static_cast<double>(j) * q[i] + shifts[m * dims + i];
          x -= std::floor(x);
          w[i] = std::abs(2.0 * x - 1.0);  // tent periodisation
          wa[i] = 1.0 - w[i];
        }
        acc += 0.5 * (integrand(p, w.data(), y.data()) + integrand(p, wa.data(), y.data()));
      }
      acc /= static_cast<double>(n);
      sum += acc;
      sum_sq += acc * acc;
    }
    value = sum / kShifts;
    const double var = std::max(0.0, (sum_sq / kShifts - value * value) * kShifts / (kShifts - 1));
    err = 3.0 * std::sqrt(var / kShifts);
    if (err <= opt.abs_tol) break;
  }
  return {std::clamp(value, 0.0, 1.0), err};
}

ProbResult closed_rectangle_2(std::span<const double> lo, std::span<const double> hi, double r) {
  const double v = bvn_lower(hi[0], hi[1], r) - bvn_lower(lo[0], hi[1], r) - bvn_lower(hi[0], lo[1], r) +
                   bvn_lower(lo[0], lo[1], r);
  return {std::clamp(v, 0.0, 1.0), 1e-14};
}

ProbResult closed_interval(double lo, double hi) {
  const double v = lo >= 0.0 ? std_normal_sf(lo) - std_normal_sf(hi) : std_normal_cdf(hi) - std_normal_cdf(lo);
  return {std::clamp(v, 0.0, 1.0), 1e-16};
}

}  // namespace

// ---- CorrelationMatrix ------------------------------------------------------

CorrelationMatrix CorrelationMatrix::identity(std::size_t d) {
  CorrelationMatrix m;
  m.d_ = d;
  m.r_.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m.r_[i * d + i] = 1.0;
  m.loadings_ = std::vector<double>(d, 0.0);
  return m;
}

CorrelationMatrix CorrelationMatrix::from_rows(std::size_t d, std::vector<double> row_major) {
  if (row_major.size() != d * d) throw ValidationError("correlation matrix: expected " + std::to_string(d * d) + " entries");
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(row_major[i * d + i] - 1.0) > kSymTol) throw ValidationError("correlation matrix: diagonal must be 1");
    row_major[i * d + i] = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = row_major[i * d + j];
      if (!std::isfinite(v) || v < -1.0 - kSymTol || v > 1.0 + kSymTol)
        throw ValidationError("correlation matrix: entry outside [-1, 1]");
      if (std::abs(v - row_major[j * d + i]) > kSymTol) throw ValidationError("correlation matrix: not symmetric");
    }
  }
  if (d > 1) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(row_major.data(), d, d);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < -kPsdTol).any())
      throw ValidationError("correlation matrix: not positive semi-definite");
  }
  CorrelationMatrix c;
  c.d_ = d;
  c.r_ = std::move(row_major);
  c.detect_factor();
  return c;
}

CorrelationMatrix CorrelationMatrix::equicorrelated(std::size_t d, double r) {
  std::vector<double> v(d * d, r);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  return from_rows(d, std::move(v));
}

CorrelationMatrix CorrelationMatrix::one_factor(std::vector<double> loadings) {
  const std::size_t d = loadings.size();
  for (double l : loadings)
    if (!(std::abs(l) <= 1.0)) throw ValidationError("one-factor loading outside [-1, 1]");
  std::vector<double> v(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) v[i * d + j] = i == j ? 1.0 : loadings[i] * loadings[j];
  CorrelationMatrix c;
  c.d_ = d;
  c.r_ = std::move(v);
  if (std::all_of(loadings.begin(), loadings.end(), [](double l) { return std::abs(l) < 1.0 - 1e-9; }))
    c.loadings_ = std::move(loadings);
  return c;
}

bool CorrelationMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j)
      if (i != j && r_[i * d_ + j] != 0.0) return false;
  return true;
}

CorrelationMatrix CorrelationMatrix::sub(std::span<const std::size_t> idx) const {
  CorrelationMatrix c;
  c.d_ = idx.size();
  c.r_.resize(c.d_ * c.d_);
  for (std::size_t i = 0; i < c.d_; ++i)
    for (std::size_t j = 0; j < c.d_; ++j) c.r_[i * c.d_ + j] = (*this)(idx[i], idx[j]);
  if (loadings_) {
    std::vector<double> l;
    for (std::size_t i : idx) l.push_back((*loadings_)[i]);
    c.loadings_ = std::move(l);
  } else {
    c.detect_factor();
  }
  return c;
}

void CorrelationMatrix::detect_factor() {
  loadings_.reset();
  const std::size_t d = d_;
  if (d == 0) return;
  auto at = [&](std::size_t i, std::size_t j) { return r_[i * d + j]; };
  // Anchor on the entry of largest magnitude.
  std::size_t i0 = 0, j0 = 0;
  double big = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (std::abs(at(i, j)) > big) {
        big = std::abs(at(i, j));
        i0 = i;
        j0 = j;
      }
  std::vector<double> lam(d, 0.0);
  if (big > 0.0) {
    double l0sq = big;  // d == 2 or no third variable: split evenly
    for (std::size_t k = 0; k < d; ++k) {
      if (k == i0 || k == j0 || std::abs(at(j0, k)) < 1e-12) continue;
      l0sq = at(i0, j0) * at(i0, k) / at(j0, k);
      break;
    }
    if (!(l0sq > 0.0)) return;
    const double l0 = std::sqrt(l0sq);
    for (std::size_t k = 0; k < d; ++k) lam[k] = k == i0 ? l0 : at(i0, k) / l0;
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(lam[i]) >= 1.0 - 1e-9) return;
    for (std::size_t j = i + 1; j < d; ++j)
      if (std::abs(lam[i] * lam[j] - at(i, j)) > 1e-12) return;
  }
  loadings_ = std::move(lam);
}

CorrelationMatrix many_to_one_correlation(std::span<const double> n_treat, double n_control) {
  if (!(n_control > 0.0)) throw ValidationError("many-to-one correlation: control size must be positive");
  std::vector<double> lam;
  for (double n : n_treat) {
    if (!(n > 0.0)) throw ValidationError("many-to-one correlation: arm size must be positive");
    lam.push_back(std::sqrt(n / (n + n_control)));
  }
  if (lam.size() == 1) return CorrelationMatrix::identity(1);
  return CorrelationMatrix::one_factor(std::move(lam));
}

// ---- probabilities ------------------------------------------------------------

const HermiteRule& hermite_rule(int n) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw ValidationError("hermite rule needs n >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  HermiteRule rule;
  for (int i = 0; i < n; ++i) {
    const double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    if (w < 1e-300) continue;
    rule.nodes.push_back(es.eigenvalues()(i));
    rule.weights.push_back(w);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

ProbResult mvn_rectangle(std::span<const double> lower, std::span<const double> upper, const CorrelationMatrix& corr,
                         MvnOptions opt) {
  const std::size_t d = corr.size();
  if (lower.size() != d || upper.size() != d) throw ValidationError("mvn_rectangle: dimension mismatch");
  for (std::size_t j = 0; j < d; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j])) throw ValidationError("mvn_rectangle: NaN bound");
    if (lower[j] > upper[j]) throw ValidationError("mvn_rectangle: lower bound above upper bound");
  }
  // Unconstrained coordinates integrate out.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < d; ++j)
    if (!(is_neg_inf(lower[j]) && is_pos_inf(upper[j]))) keep.push_back(j);
  if (keep.empty()) return {1.0, 0.0};
  if (keep.size() < d) {
    std::vector<double> lo, hi;
    for (std::size_t j : keep) {
      lo.push_back(lower[j]);
      hi.push_back(upper[j]);
    }
    return mvn_rectangle(lo, hi, corr.sub(keep), opt);
  }
  if (opt.force_lattice) return lattice_rectangle(lower, upper, corr, opt);
  if (d == 1) return closed_interval(lower[0], upper[0]);
  if (d == 2) return closed_rectangle_2(lower, upper, corr(0, 1));
  if (corr.is_diagonal()) {
    double v = 1.0;
    for (std::size_t j = 0; j < d; ++j) v *= closed_interval(lower[j], upper[j]).value;
    return {v, 1e-15};
  }
  if (const auto& lam = corr.loadings()) return factor_rectangle(lower, upper, *lam, opt);
  return lattice_rectangle(lower, upper, corr, opt);
}

ProbResult mvn_upper_orthant_union(std::span<const double> thresholds, const CorrelationMatrix& corr,
                                   MvnOptions opt) {
  const std::size_t d = corr.size();
  if (thresholds.size() != d) throw ValidationError("mvn_upper_orthant_union: dimension mismatch");
  if (d == 0) return {0.0, 0.0};
  if (opt.force_lattice) {
    std::vector<double> lower(d, -std::numeric_limits<double>::infinity());
    const ProbResult inside = mvn_rectangle(lower, thresholds, corr, opt);
    return {std::clamp(1.0 - inside.value, 0.0, 1.0), inside.error_estimate};
  }
  if (d == 1) return {std_normal_sf(thresholds[0]), 1e-16};
  if (d == 2) {
    // P(A or B) = P(A) + P(B) - P(A and B), no cancellation for small tails.
    const double v = std_normal_sf(thresholds[0]) + std_normal_sf(thresholds[1]) -
                     bvn_upper(thresholds[0], thresholds[1], corr(0, 1));
    return {std::clamp(v, 0.0, 1.0), 1e-14};
  }
  std::vector<double> lower(d, -std::numeric_limits<double>::infinity());
  const ProbResult inside = mvn_rectangle(lower, thresholds, corr, opt);
  return {std::clamp(1.0 - inside.value, 0.0, 1.0), inside.error_estimate};
}

ProbResult mvn_two_stage_union(std::span<const double> a, std::span<const double> b, const CorrelationMatrix& corr,
                               double t, MvnOptions opt) {
  const std::size_t m = corr.size();
  if (a.size() != m || b.size() != m) throw ValidationError("mvn_two_stage_union: dimension mismatch");
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("mvn_two_stage_union: t must lie in (0, 1)");
  const double rt = std::sqrt(t);
  const double rc = std::sqrt(1.0 - t);
  if (m == 1 && !opt.force_lattice) {
    const double v = 1.0 - bvn_lower(a[0], b[0], rt);
    return {std::clamp(v, 0.0, 1.0), 1e-14};
  }
  const auto& lam = corr.loadings();
  if (lam && !opt.force_lattice && max_slope(*lam) > kMaxHermiteSlope) {
    // Steep loadings: nested adaptive Gauss-Kronrod over the stage-one
    // factor and the stage-two increment.
    const BivariateNormalCdf phi2(rt);
    std::vector<double> s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = std::sqrt(1.0 - (*lam)[j] * (*lam)[j]);
    const double inv_sqrt_2pi = 0.3989422804014327;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err_total = 0.0;
    auto outer = [&](double x1) {
      auto inner = [&](double x2) {
        const double f2 = rt * x1 + rc * x2;
        double prod = inv_sqrt_2pi * std::exp(-0.5 * x2 * x2);
        for (std::size_t j = 0; j < m && prod > 0.0; ++j) {
          const double l = (*lam)[j];
          prod *= phi2((a[j] - l * x1) / s[j], (b[j] - l * f2) / s[j]);
        }
        return prod;
      };
      double e = 0.0;
      const double v = GK::integrate(inner, -9.0, 9.0, 15, 1e-11, &e);
      err_total = std::max(err_total, e);
      return inv_sqrt_2pi * std::exp(-0.5 * x1 * x1) * v;
    };
    double e = 0.0;
    const double inside = GK::integrate(outer, -9.0, 9.0, 15, 1e-11, &e);
    return {std::clamp(1.0 - inside, 0.0, 1.0), e + err_total + 1e-14};
  }
  if (lam && !opt.force_lattice) {
    // Given both common factors, members are independent bivariate pairs
    // with cross-stage correlation sqrt(t).
    const BivariateNormalCdf phi2(rt);
    std::vector<double> s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = std::sqrt(1.0 - (*lam)[j] * (*lam)[j]);
    auto integrate = [&](const HermiteRule& rule) {
      double total = 0.0;
      for (std::size_t k1 = 0; k1 < rule.nodes.size(); ++k1) {
        const double x1 = rule.nodes[k1];
        double inner = 0.0;
        for (std::size_t k2 = 0; k2 < rule.nodes.size(); ++k2) {
          const double f2 = rt * x1 + rc * rule.nodes[k2];
          double prod = rule.weights[k2];
          for (std::size_t j = 0; j < m && prod > 0.0; ++j) {
            const double l = (*lam)[j];
            prod *= phi2((a[j] - l * x1) / s[j], (b[j] - l * f2) / s[j]);
          }
          inner += prod;
        }
        total += rule.weights[k1] * inner;
      }
      return total;
    };
    const double inside = integrate(hermite_rule(kHermite2N));
    double err = 1e-14;
    if (opt.estimate_error) err += std::abs(inside - integrate(hermite_rule(kHermite2CheckN)));
    return {std::clamp(1.0 - inside, 0.0, 1.0), err};
  }
  std::vector<double> big(4 * m * m);
  const std::size_t n = 2 * m;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double r = corr(i, j);
      big[i * n + j] = r;
      big[(i + m) * n + (j + m)] = r;
      big[i * n + (j + m)] = rt * r;
      big[(i + m) * n + j] = rt * r;
    }
  const CorrelationMatrix joint = CorrelationMatrix::from_rows(n, std::move(big));
  std::vector<double> thr(a.begin(), a.end());
  thr.insert(thr.end(), b.begin(), b.end());
  return mvn_upper_orthant_union(thr, joint, opt);
}

}  // namespace adaptmt
