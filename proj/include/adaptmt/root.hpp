#pragma once

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "adaptmt/error.hpp"

namespace adaptmt {

struct RootOptions {
  double f_tol = 1e-12;   // accept x once |f(x)| <= f_tol
  double x_tol = 1e-12;   // or once the bracket is this narrow
  std::uintmax_t max_iter = 200;
};

// Root of a continuous function with a sign change on [lo, hi].
// Backed by the TOMS 748 bracketing solver (bisection/secant/inverse cubic).
template <class F>
double find_root(F&& f, double lo, double hi, RootOptions opt = {}) {
  if (!(lo < hi)) throw ValidationError("find_root: empty bracket");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi)) throw NumericalError("find_root: NaN at bracket end");
  if (std::abs(flo) <= opt.f_tol) return lo;
  if (std::abs(fhi) <= opt.f_tol) return hi;
  if ((flo < 0) == (fhi < 0)) throw NumericalError("find_root: no sign change in bracket");

  // Values within f_tol count as exact zeros, which stops the solver there.
  auto g = [&](double x) {
    const double v = f(x);
    if (std::isnan(v)) throw NumericalError("find_root: NaN objective");
    return std::abs(v) <= opt.f_tol ? 0.0 : v;
  };
  auto done = [&](double a, double b) { return std::abs(b - a) <= opt.x_tol; };
  std::uintmax_t iters = opt.max_iter;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, done, iters);
  if (iters >= opt.max_iter) throw NumericalError("find_root: iteration limit reached");
  return a == b ? a : 0.5 * (a + b);
}

}  // namespace adaptmt
