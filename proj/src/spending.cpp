#include "adaptmt/spending.hpp"

#include <cmath>

#include "adaptmt/error.hpp"
#include "adaptmt/normal.hpp"
#include "adaptmt/root.hpp"

namespace adaptmt {
double spend_alpha1(double t, double alpha) {
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("spending: information fraction must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("spending: alpha must lie in (0, 1)");
  return 2.0 * std_normal_sf(std_normal_quantile_upper(alpha / 2.0) / std::sqrt(t));
}

double solve_alpha2(double alpha, double alpha_1, double nu1, double nu2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("solve_alpha2: alpha must lie in (0, 1)");
  if (!(alpha_1 >= 0.0 && alpha_1 < alpha)) throw ValidationError("solve_alpha2: need 0 <= alpha_1 < alpha");
  if (std::abs(nu1 * nu1 + nu2 * nu2 - 1.0) > 1e-12 || nu1 < 0.0 || nu2 <= 0.0)
    throw ValidationError("solve_alpha2: need nu1^2 + nu2^2 = 1 with nu2 > 0");
  if (alpha_1 == 0.0) return alpha;
  const double a = std_normal_quantile_upper(alpha_1);
  const double pa = std_normal_cdf(a);
  // In the combined statistic's z-scale b, the continuation-region rejection
  // probability is Phi(a) - Phi2(a, b; nu1).
  auto f = [&](double b) { return alpha_1 + pa - bvn_lower(a, b, nu1) - alpha; };
  const double b = find_root(f, -8.0, 38.0, {.f_tol = 1e-15, .x_tol = 1e-13});
  return std_normal_sf(b);
}

double inverse_normal_combine(double p1, double p2, double nu1, double nu2) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
    throw ValidationError("inverse_normal_combine: p-values must lie in [0, 1]");
  if ((p2 >= 1.0 && nu2 > 0.0) || (p1 >= 1.0 && nu1 > 0.0)) return 1.0;
  const double z = (nu1 > 0.0 ? nu1 * z_from_p(p1) : 0.0) + (nu2 > 0.0 ? nu2 * z_from_p(p2) : 0.0);
  return std_normal_sf(z);
}

}  // namespace adaptmt
