#pragma once

#include <cmath>

namespace adaptmt::kernels::detail {

// Chebyshev expansion of erfc on z >= 0 in t = 2/(2+z); absolute error below
// 5e-16 over the whole range.
inline constexpr int kErfcTerms = 28;
inline constexpr double kErfcCoef[kErfcTerms] = {
    -1.3026537197817094,   6.4196979235649026e-1, 1.9476473204185836e-2, -9.561514786808631e-3,
    -9.46595344482036e-4,  3.66839497852761e-4,   4.2523324806907e-5,    -2.0278578112534e-5,
    -1.624290004647e-6,    1.303655835580e-6,     1.5626441722e-8,       -8.5238095915e-8,
    6.529054439e-9,        5.059343495e-9,        -9.91364156e-10,       -2.27365122e-10,
    9.6467911e-11,         2.394038e-12,          -6.886027e-12,         8.94487e-13,
    3.13092e-13,           -1.12708e-13,          3.81e-16,              7.106e-15,
    -1.523e-15,            -9.4e-17,              1.21e-16,              -2.8e-17};

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline double erfc_nonneg(double z) {
  const double t = 2.0 / (2.0 + z);
  const double ty = 4.0 * t - 2.0;
  double d = 0.0;
  double dd = 0.0;
  for (int j = kErfcTerms - 1; j > 0; --j) {
    const double tmp = d;
    d = ty * d - dd + kErfcCoef[j];
    dd = tmp;
  }
  return t * std::exp(-z * z + 0.5 * (kErfcCoef[0] + ty * d) - dd);
}

inline double phi_cheb(double x) {
  const double z = -x * kInvSqrt2;
  if (z >= 0.0) return 0.5 * erfc_nonneg(z);
  return 1.0 - 0.5 * erfc_nonneg(-z);
}

}  // namespace adaptmt::kernels::detail
