#include "adaptmt/normal.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "adaptmt/error.hpp"

namespace adaptmt {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre half-rules (6, 12 and 20 points) used by the Drezner-Wesolowsky
// scheme as refined by Genz.
constexpr double kGlW[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659, 0.2334925365383547,
     0.2491470458134029},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475, 0.1019301198172404,
     0.1181945319615184, 0.1316886384491766, 0.1420961093183821, 0.1491729864726037, 0.1527533871307259}};
constexpr double kGlX[3][10] = {
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171, -0.3678314989981802,
     -0.1252334085114692},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188, -0.7463319064601508,
     -0.6360536807265150, -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
     -0.07652652113349733}};
constexpr int kGlN[3] = {3, 6, 10};

int rule_for(double r) {
  const double ar = std::abs(r);
  if (ar < 0.3) return 0;
  if (ar < 0.75) return 1;
  return 2;
}

// P(X > h, Y > k), Genz's BVNU.
double bvnu(double h, double k, double r) {
  if (r == 0.0) return std_normal_sf(h) * std_normal_sf(k);
  const int g = rule_for(r);
  const int lg = kGlN[g];
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (kGlX[g][i] + 1.0) / 2.0);
      bvn += kGlW[g][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-kGlX[g][i] + 1.0) / 2.0);
      bvn += kGlW[g][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + std_normal_sf(h) * std_normal_sf(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      bvn = a * std::exp(-(bs / as + hk) / 2.0) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * std_normal_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < lg; ++i) {
        for (double sgn : {-1.0, 1.0}) {
          double xs = a * (sgn * kGlX[g][i] + 1.0);
          xs *= xs;
          const double rs = std::sqrt(1.0 - xs);
          const double e = -(bs / xs + hk) / 2.0;
          if (e > -100.0) {
            bvn += a * kGlW[g][i] * std::exp(e) *
                   (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += std_normal_sf(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double l = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h) : std_normal_sf(h) - std_normal_sf(k);
      bvn = l - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs 0 < p < 1");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double std_normal_quantile_upper(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs 0 < p < 1");
  return kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double z_from_p(double p) {
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  if (p >= 1.0) return -std::numeric_limits<double>::infinity();
  return kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bvn_upper(double h, double k, double r) {
  if (std::isinf(h) || std::isinf(k)) {
    if (h == -INFINITY) return std_normal_sf(k);
    if (k == -INFINITY) return std_normal_sf(h);
    return 0.0;
  }
  if (r >= 1.0) return std_normal_sf(std::max(h, k));
  if (r <= -1.0) return std::max(0.0, std_normal_sf(h) - std_normal_cdf(k));
  return bvnu(h, k, r);
}

double bvn_lower(double h, double k, double r) { return bvn_upper(-h, -k, r); }

BivariateNormalCdf::BivariateNormalCdf(double r) : r_(r) {
  if (std::abs(r) < 0.925 && r != 0.0) {
    const int g = rule_for(r);
    n_ = 2 * kGlN[g];
    asr_ = std::asin(r);
    for (int i = 0; i < kGlN[g]; ++i) {
      sn_[2 * i] = std::sin(asr_ * (kGlX[g][i] + 1.0) / 2.0);
      sn_[2 * i + 1] = std::sin(asr_ * (-kGlX[g][i] + 1.0) / 2.0);
      wt_[2 * i] = wt_[2 * i + 1] = kGlW[g][i];
    }
  }
}

double BivariateNormalCdf::operator()(double h, double k) const {
  if (n_ == 0 || std::isinf(h) || std::isinf(k)) return bvn_lower(h, k, r_);
  // Lower orthant at (h, k) is the upper orthant at (-h, -k).
  const double hk = h * k;
  const double hs = (h * h + k * k) / 2.0;
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += wt_[i] * std::exp((sn_[i] * hk - hs) / (1.0 - sn_[i] * sn_[i]));
  const double v = s * asr_ / (2.0 * kTwoPi) + std_normal_cdf(h) * std_normal_cdf(k);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace adaptmt
