#include <cassert>

#include "adaptmt/kernels/kernels.hpp"
#include "erfc_cheb.hpp"

namespace adaptmt::kernels::scalar {

void normal_cdf(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = detail::phi_cheb(x[i]);
}

double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope) {
  assert(nodes.size() == weights.size() && offset.size() == slope.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double prod = weights[k];
    for (std::size_t j = 0; j < offset.size(); ++j) prod *= detail::phi_cheb(offset[j] + slope[j] * nodes[k]);
    total += prod;
  }
  return total;
}

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) {
    m.sum += v;
    m.sum_sq += v * v;
  }
  return m;
}

void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out) {
  assert(x.size() == y.size() && out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i] + c;
}

}  // namespace adaptmt::kernels::scalar
