#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "adaptmt/kernels/kernels.hpp"

namespace adaptmt::kernels {

#ifdef ADAPTMT_HAVE_AVX2
bool avx2_available() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}
#else
bool avx2_available() { return false; }

namespace avx2 {
// Never selected when the variants are not built.
void normal_cdf(std::span<const double> x, std::span<double> out) { scalar::normal_cdf(x, out); }
double factor_product_sum(std::span<const double> n, std::span<const double> w, std::span<const double> o,
                          std::span<const double> s) {
  return scalar::factor_product_sum(n, w, o, s);
}
Moments moments(std::span<const double> x) { return scalar::moments(x); }
void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out) {
  scalar::affine2(x, y, a, b, c, out);
}
}  // namespace avx2
#endif

namespace {

Isa initial_isa() {
  // ADAPTMT_ISA=scalar pins the reference path.
  if (const char* env = std::getenv("ADAPTMT_ISA"); env && std::string_view(env) == "scalar") return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw std::invalid_argument("AVX2 kernels unavailable on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void normal_cdf(std::span<const double> x, std::span<double> out) {
  active_isa() == Isa::Avx2 ? avx2::normal_cdf(x, out) : scalar::normal_cdf(x, out);
}

double factor_product_sum(std::span<const double> nodes, std::span<const double> weights,
                          std::span<const double> offset, std::span<const double> slope) {
  return active_isa() == Isa::Avx2 ? avx2::factor_product_sum(nodes, weights, offset, slope)
                                   : scalar::factor_product_sum(nodes, weights, offset, slope);
}

Moments moments(std::span<const double> x) {
  return active_isa() == Isa::Avx2 ? avx2::moments(x) : scalar::moments(x);
}

void affine2(std::span<const double> x, std::span<const double> y, double a, double b, double c,
             std::span<double> out) {
  active_isa() == Isa::Avx2 ? avx2::affine2(x, y, a, b, c, out) : scalar::affine2(x, y, a, b, c, out);
}

}  // namespace adaptmt::kernels
