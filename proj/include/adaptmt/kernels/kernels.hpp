#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the variant is chosen once at startup from CPUID and can be
// overridden (tests run both and compare).

#include <span>

namespace adaptmt::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Throws std::invalid_argument when asking for Avx2 on a CPU without it.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

// out[i] = Phi(x[i]).
void normal_cdf(std::span<const double> x, std::span<double> out);

// sum_k weights[k] * prod_j Phi(offset[j] + slope[j] * nodes[k]).
// The one-factor Gaussian orthant integral reduces to this sum.
double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope);

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};
Moments moments(std::span<const double> x);

// out[i] = a * x[i] + b * y[i] + c
void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out);

// Explicit variants, used by the dispatcher and by equivalence tests.
namespace scalar {
void normal_cdf(std::span<const double> x, std::span<double> out);
double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope);
Moments moments(std::span<const double> x);
void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out);
}  // namespace scalar

namespace avx2 {
void normal_cdf(std::span<const double> x, std::span<double> out);
double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope);
Moments moments(std::span<const double> x);
void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out);
}  // namespace avx2

}  // namespace adaptmt::kernels
