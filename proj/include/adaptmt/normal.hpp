#pragma once

namespace adaptmt {

// Phi(x)
double std_normal_cdf(double x);
// 1 - Phi(x), computed without cancellation.
double std_normal_sf(double x);
double std_normal_pdf(double x);
// Phi^{-1}(p); throws ValidationError unless 0 < p < 1.
double std_normal_quantile(double p);
// Phi^{-1}(1 - p), accurate for tiny p.
double std_normal_quantile_upper(double p);

// z = Phi^{-1}(1 - p) with p = 0 and p = 1 mapped to +inf and -inf.
double z_from_p(double p);

// P(X > h, Y > k) for a standard bivariate normal with correlation r.
double bvn_upper(double h, double k, double r);
// P(X < h, Y < k).
double bvn_lower(double h, double k, double r);

// P(X < h, Y < k) for a correlation fixed at construction; trig tables are
// precomputed so repeated calls inside quadrature loops stay cheap.
class BivariateNormalCdf {
 public:
  explicit BivariateNormalCdf(double r);
  double operator()(double h, double k) const;
  double correlation() const { return r_; }

 private:
  double r_;
  int n_ = 0;
  double asr_ = 0.0;
  double sn_[20] = {};
  double wt_[20] = {};
};

}  // namespace adaptmt
