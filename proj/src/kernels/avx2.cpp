// Compiled with -mavx2 -mfma; only reached when the CPU reports AVX2.

#include <immintrin.h>

#include <cassert>

#include "adaptmt/kernels/kernels.hpp"
#include "erfc_cheb.hpp"

namespace adaptmt::kernels::avx2 {
namespace {

// exp for x in [-708, 709]: Cody-Waite reduction by ln2, degree-12 Taylor
// polynomial on |r| <= ln2/2, scale by 2^n through the exponent field.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

  static constexpr double c[13] = {1.0,
                                   1.0,
                                   1.0 / 2,
                                   1.0 / 6,
                                   1.0 / 24,
                                   1.0 / 120,
                                   1.0 / 720,
                                   1.0 / 5040,
                                   1.0 / 40320,
                                   1.0 / 362880,
                                   1.0 / 3628800,
                                   1.0 / 39916800,
                                   1.0 / 479001600};
  __m256d p = _mm256_set1_pd(c[12]);
  for (int i = 11; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
  ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(ni));
}

inline __m256d erfc_nonneg_pd(__m256d z) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d t = _mm256_div_pd(two, _mm256_add_pd(two, z));
  const __m256d ty = _mm256_fmsub_pd(_mm256_set1_pd(4.0), t, two);
  __m256d d = _mm256_setzero_pd();
  __m256d dd = _mm256_setzero_pd();
  for (int j = detail::kErfcTerms - 1; j > 0; --j) {
    const __m256d tmp = d;
    d = _mm256_add_pd(_mm256_fmsub_pd(ty, d, dd), _mm256_set1_pd(detail::kErfcCoef[j]));
    dd = tmp;
  }
  // -z^2 + 0.5 * (c0 + ty * d) - dd
  __m256d arg = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_fmadd_pd(ty, d, _mm256_set1_pd(detail::kErfcCoef[0])));
  arg = _mm256_sub_pd(_mm256_fnmadd_pd(z, z, arg), dd);
  return _mm256_mul_pd(t, exp_pd(arg));
}

inline __m256d phi_pd(__m256d x) {
  const __m256d z = _mm256_mul_pd(x, _mm256_set1_pd(-detail::kInvSqrt2));
  const __m256d az = _mm256_andnot_pd(_mm256_set1_pd(-0.0), z);
  const __m256d half = _mm256_mul_pd(_mm256_set1_pd(0.5), erfc_nonneg_pd(az));
  const __m256d neg = _mm256_cmp_pd(z, _mm256_setzero_pd(), _CMP_LT_OQ);
  return _mm256_blendv_pd(half, _mm256_sub_pd(_mm256_set1_pd(1.0), half), neg);
}

inline double hsum(__m256d v) {
  alignas(32) double a[4];
  _mm256_store_pd(a, v);
  return (a[0] + a[1]) + (a[2] + a[3]);
}

}  // namespace

void normal_cdf(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) _mm256_storeu_pd(out.data() + i, phi_pd(_mm256_loadu_pd(x.data() + i)));
  for (; i < x.size(); ++i) out[i] = detail::phi_cheb(x[i]);
}

double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope) {
  assert(nodes.size() == weights.size() && offset.size() == slope.size());
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= nodes.size(); k += 4) {
    const __m256d nk = _mm256_loadu_pd(nodes.data() + k);
    __m256d prod = _mm256_loadu_pd(weights.data() + k);
    for (std::size_t j = 0; j < offset.size(); ++j) {
      const __m256d arg = _mm256_fmadd_pd(_mm256_set1_pd(slope[j]), nk, _mm256_set1_pd(offset[j]));
      prod = _mm256_mul_pd(prod, phi_pd(arg));
    }
    acc = _mm256_add_pd(acc, prod);
  }
  double total = hsum(acc);
  for (; k < nodes.size(); ++k) {
    double prod = weights[k];
    for (std::size_t j = 0; j < offset.size(); ++j) prod *= detail::phi_cheb(offset[j] + slope[j] * nodes[k]);
    total += prod;
  }
  return total;
}

Moments moments(std::span<const double> x) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    s = _mm256_add_pd(s, v);
    q = _mm256_fmadd_pd(v, v, q);
  }
  Moments m{hsum(s), hsum(q)};
  for (; i < x.size(); ++i) {
    m.sum += x[i];
    m.sum_sq += x[i] * x[i];
  }
  return m;
}

void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out) {
  assert(x.size() == y.size() && out.size() >= x.size());
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i),
                                      _mm256_fmadd_pd(vb, _mm256_loadu_pd(y.data() + i), vc));
    _mm256_storeu_pd(out.data() + i, r);
  }
  for (; i < x.size(); ++i) out[i] = a * x[i] + b * y[i] + c;
}

}  // namespace adaptmt::kernels::avx2
