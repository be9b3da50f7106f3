#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

// Shared constants and the scalar cores for the math kernels. The AVX2
// translation unit mirrors these step for step; any change here must be
// replicated there or the bitwise-equivalence tests will fail.
namespace copath::kernels::detail {

struct Backend {
  void (*exp_batch)(const double*, double*, std::size_t);
  void (*log_batch)(const double*, double*, std::size_t);
  double (*sum_exp)(const double*, std::size_t);
  void (*gauss_cross_sum)(const double*, std::size_t, double, double*);
  void (*gauss_cross_moments)(const double*, const double*, std::size_t, double, double*,
                              double*, double*);
  void (*horowitz_cdf)(const double*, double*, std::size_t);
  void (*horowitz_pdf)(const double*, double*, std::size_t);
};

// Defined in kernels_avx2.cpp; null when the CPU lacks AVX2+FMA.
const Backend* avx2_backend();

// exp: Cody-Waite argument reduction + Cephes rational approximation.
inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125e-1;
inline constexpr double kLn2Lo = 1.42860682030941723212e-6;
inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;
inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;
inline constexpr double kExpClamp = 708.0;

// log: Cephes rational approximation on [sqrt(1/2), sqrt(2)).
inline constexpr double kSqrtHalf = 0.70710678118654752440;
inline constexpr double kLogP0 = 1.01875663804580931796e-4;
inline constexpr double kLogP1 = 4.97494994976747001425e-1;
inline constexpr double kLogP2 = 4.70579119878881725854e0;
inline constexpr double kLogP3 = 1.44989225341610930846e1;
inline constexpr double kLogP4 = 1.79368678507819816313e1;
inline constexpr double kLogP5 = 7.70838733755885391666e0;
inline constexpr double kLogQ0 = 1.12873587189167450590e1;
inline constexpr double kLogQ1 = 4.52279145837532221105e1;
inline constexpr double kLogQ2 = 8.29875266912776603211e1;
inline constexpr double kLogQ3 = 7.11544750618563894466e1;
inline constexpr double kLogQ4 = 2.31251620126765340583e1;
inline constexpr double kLn2LoNeg = 2.121944400546905827679e-4;
inline constexpr double kLn2HiShort = 0.693359375;

// Horowitz kernel CDF polynomial, written in u = s^2.
inline constexpr double kHorScale = 105.0 / 64.0;
inline constexpr double kHor1 = -5.0 / 3.0;
inline constexpr double kHor2 = 7.0 / 5.0;
inline constexpr double kHor3 = -3.0 / 7.0;

inline double exp_core(double x) {
  x = std::min(std::max(x, -kExpClamp), kExpClamp);
  double n = std::nearbyint(x * kLog2e);
  double r = std::fma(n, -kLn2Hi, x);
  r = std::fma(n, -kLn2Lo, r);
  double r2 = r * r;
  double p = kExpP0;
  p = std::fma(p, r2, kExpP1);
  p = std::fma(p, r2, kExpP2);
  p *= r;
  double q = kExpQ0;
  q = std::fma(q, r2, kExpQ1);
  q = std::fma(q, r2, kExpQ2);
  q = std::fma(q, r2, kExpQ3);
  double e = p / (q - p);
  double y = std::fma(2.0, e, 1.0);
  // scale by 2^n exactly through the exponent field
  auto bits = std::bit_cast<std::uint64_t>(y);
  bits += static_cast<std::uint64_t>(static_cast<std::int64_t>(n)) << 52;
  return std::bit_cast<double>(bits);
}

inline double log_core(double x) {
  bool valid = x >= std::numeric_limits<double>::min() &&
               x <= std::numeric_limits<double>::max();
  auto bits = std::bit_cast<std::uint64_t>(x);
  double e = static_cast<double>(static_cast<std::int32_t>((bits >> 52) & 0x7FF)) - 1022.0;
  double m = std::bit_cast<double>((bits & 0xFFFFFFFFFFFFFull) | 0x3FE0000000000000ull);
  if (m < kSqrtHalf) {
    e -= 1.0;
    m += m;
  }
  double z = m - 1.0;
  double z2 = z * z;
  double p = kLogP0;
  p = std::fma(p, z, kLogP1);
  p = std::fma(p, z, kLogP2);
  p = std::fma(p, z, kLogP3);
  p = std::fma(p, z, kLogP4);
  p = std::fma(p, z, kLogP5);
  double q = z + kLogQ0;
  q = std::fma(q, z, kLogQ1);
  q = std::fma(q, z, kLogQ2);
  q = std::fma(q, z, kLogQ3);
  q = std::fma(q, z, kLogQ4);
  double y = z * (z2 * (p / q));
  y = std::fma(e, -kLn2LoNeg, y);
  y = std::fma(z2, -0.5, y);
  double res = z + y;
  res = std::fma(e, kLn2HiShort, res);
  return valid ? res : std::numeric_limits<double>::quiet_NaN();
}

inline double horowitz_cdf_core(double s) {
  if (s > 1.0) return 1.0;
  if (s < -1.0) return 0.0;
  double u = s * s;
  double g = kHor3;
  g = std::fma(g, u, kHor2);
  g = std::fma(g, u, kHor1);
  g = std::fma(g, u, 1.0);
  return std::fma(kHorScale * s, g, 0.5);
}

inline double horowitz_pdf_core(double s) {
  if (s > 1.0 || s < -1.0) return 0.0;
  double t = 1.0 - s * s;
  double t2 = t * t;
  return kHorScale * (t2 * t);
}

}  // namespace copath::kernels::detail
