// AVX2+FMA variants of the math kernels. Each function mirrors the scalar
// reference in kernels_common.hpp operation for operation: explicit FMA where
// the scalar uses std::fma, separate mul/add where it does not, and the same
// (a0+a2)+(a1+a3) reduction with an in-order scalar tail. Keeping the two in
// lockstep is what makes the bitwise equivalence tests meaningful.

#include <cstddef>

#include "kernels_common.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define COPATH_X86 1
#include <immintrin.h>
#else
#define COPATH_X86 0
#endif

namespace copath::kernels::detail {

#if COPATH_X86

namespace {

__attribute__((target("avx2,fma"))) inline __m256d exp_vec(__m256d x) {
  const __m256d clamp = _mm256_set1_pd(kExpClamp);
  x = _mm256_min_pd(_mm256_max_pd(x, _mm256_sub_pd(_mm256_setzero_pd(), clamp)), clamp);
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kLn2Hi), x);
  r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kLn2Lo), r);
  __m256d r2 = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(kExpP0);
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(kExpP1));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(kExpP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(kExpQ0);
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(kExpQ1));
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(kExpQ2));
  q = _mm256_fmadd_pd(q, r2, _mm256_set1_pd(kExpQ3));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  __m256d y = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));
  __m128i k32 = _mm256_cvtpd_epi32(n);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits = _mm256_add_epi64(_mm256_castpd_si256(y), _mm256_slli_epi64(k64, 52));
  return _mm256_castsi256_pd(bits);
}

__attribute__((target("avx2,fma"))) inline __m256d log_vec(__m256d x) {
  const __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::min());
  const __m256d vmax = _mm256_set1_pd(std::numeric_limits<double>::max());
  __m256d valid = _mm256_and_pd(_mm256_cmp_pd(x, vmin, _CMP_GE_OQ),
                                _mm256_cmp_pd(x, vmax, _CMP_LE_OQ));
  __m256i bits = _mm256_castpd_si256(x);
  __m256i expfield = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7FF));
  __m256i packed = _mm256_permutevar8x32_epi32(expfield, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
  __m256d e = _mm256_sub_pd(_mm256_cvtepi32_pd(_mm256_castsi256_si128(packed)),
                            _mm256_set1_pd(1022.0));
  __m256i mbits = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0xFFFFFFFFFFFFFll)),
                                  _mm256_set1_epi64x(0x3FE0000000000000ll));
  __m256d m = _mm256_castsi256_pd(mbits);
  __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrtHalf), _CMP_LT_OQ);
  e = _mm256_add_pd(e, _mm256_and_pd(small, _mm256_set1_pd(-1.0)));
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), small);
  __m256d z = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  __m256d z2 = _mm256_mul_pd(z, z);
  __m256d p = _mm256_set1_pd(kLogP0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kLogP1));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kLogP2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kLogP3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kLogP4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kLogP5));
  __m256d q = _mm256_add_pd(z, _mm256_set1_pd(kLogQ0));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kLogQ1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kLogQ2));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kLogQ3));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(kLogQ4));
  __m256d y = _mm256_mul_pd(z, _mm256_mul_pd(z2, _mm256_div_pd(p, q)));
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(-kLn2LoNeg), y);
  y = _mm256_fmadd_pd(z2, _mm256_set1_pd(-0.5), y);
  __m256d res = _mm256_add_pd(z, y);
  res = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2HiShort), res);
  return _mm256_blendv_pd(_mm256_set1_pd(std::numeric_limits<double>::quiet_NaN()), res, valid);
}

__attribute__((target("avx2,fma"))) inline double reduce4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);  // [v0+v2, v1+v3]
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

__attribute__((target("avx2,fma"))) void exp_batch_avx2(const double* x, double* y,
                                                        std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp_vec(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = exp_core(x[i]);
}

__attribute__((target("avx2,fma"))) void log_batch_avx2(const double* x, double* y,
                                                        std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, log_vec(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = log_core(x[i]);
}

__attribute__((target("avx2,fma"))) double sum_exp_avx2(const double* x, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, exp_vec(_mm256_loadu_pd(x + i)));
  double acc = reduce4(vacc);
  for (; i < n; ++i) acc += exp_core(x[i]);
  return acc;
}

__attribute__((target("avx2,fma"))) void gauss_cross_sum_avx2(const double* x, std::size_t n,
                                                              double h, double* out) {
  const double invh = 1.0 / h;
  const __m256d vinvh = _mm256_set1_pd(invh);
  const __m256d vhalf = _mm256_set1_pd(-0.5);
  for (std::size_t k = 0; k < n; ++k) {
    const __m256d vxk = _mm256_set1_pd(x[k]);
    __m256d vacc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d s = _mm256_mul_pd(_mm256_sub_pd(vxk, _mm256_loadu_pd(x + j)), vinvh);
      __m256d arg = _mm256_mul_pd(_mm256_mul_pd(s, s), vhalf);
      vacc = _mm256_add_pd(vacc, exp_vec(arg));
    }
    double acc = reduce4(vacc);
    for (; j < n; ++j) {
      double s = (x[k] - x[j]) * invh;
      acc += exp_core((s * s) * -0.5);
    }
    out[k] = acc;
  }
}

__attribute__((target("avx2,fma"))) void gauss_cross_moments_avx2(const double* x,
                                                                  const double* w, std::size_t n,
                                                                  double h, double* out0,
                                                                  double* out1, double* out2) {
  const double invh = 1.0 / h;
  const __m256d vinvh = _mm256_set1_pd(invh);
  const __m256d vhalf = _mm256_set1_pd(-0.5);
  for (std::size_t k = 0; k < n; ++k) {
    const __m256d vxk = _mm256_set1_pd(x[k]);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d s = _mm256_mul_pd(_mm256_sub_pd(vxk, _mm256_loadu_pd(x + j)), vinvh);
      __m256d g = exp_vec(_mm256_mul_pd(_mm256_mul_pd(s, s), vhalf));
      __m256d se = _mm256_mul_pd(s, g);
      acc0 = _mm256_add_pd(acc0, g);
      acc1 = _mm256_add_pd(acc1, se);
      acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_loadu_pd(w + j), se));
    }
    double m0 = reduce4(acc0);
    double m1 = reduce4(acc1);
    double m2 = reduce4(acc2);
    for (; j < n; ++j) {
      double s = (x[k] - x[j]) * invh;
      double g = exp_core((s * s) * -0.5);
      double se = s * g;
      m0 += g;
      m1 += se;
      m2 += w[j] * se;
    }
    out0[k] = m0;
    out1[k] = m1;
    out2[k] = m2;
  }
}

__attribute__((target("avx2,fma"))) void horowitz_cdf_avx2(const double* s, double* out,
                                                           std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d mone = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(s + i);
    __m256d sc = _mm256_min_pd(_mm256_max_pd(v, mone), one);
    __m256d u = _mm256_mul_pd(sc, sc);
    __m256d g = _mm256_set1_pd(kHor3);
    g = _mm256_fmadd_pd(g, u, _mm256_set1_pd(kHor2));
    g = _mm256_fmadd_pd(g, u, _mm256_set1_pd(kHor1));
    g = _mm256_fmadd_pd(g, u, one);
    __m256d val = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_set1_pd(kHorScale), sc), g,
                                  _mm256_set1_pd(0.5));
    val = _mm256_blendv_pd(val, one, _mm256_cmp_pd(v, one, _CMP_GT_OQ));
    val = _mm256_blendv_pd(val, _mm256_setzero_pd(), _mm256_cmp_pd(v, mone, _CMP_LT_OQ));
    _mm256_storeu_pd(out + i, val);
  }
  for (; i < n; ++i) out[i] = horowitz_cdf_core(s[i]);
}

__attribute__((target("avx2,fma"))) void horowitz_pdf_avx2(const double* s, double* out,
                                                           std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d mone = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(s + i);
    __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(v, v));
    __m256d t2 = _mm256_mul_pd(t, t);
    __m256d val = _mm256_mul_pd(_mm256_set1_pd(kHorScale), _mm256_mul_pd(t2, t));
    __m256d outside = _mm256_or_pd(_mm256_cmp_pd(v, one, _CMP_GT_OQ),
                                   _mm256_cmp_pd(v, mone, _CMP_LT_OQ));
    val = _mm256_blendv_pd(val, _mm256_setzero_pd(), outside);
    _mm256_storeu_pd(out + i, val);
  }
  for (; i < n; ++i) out[i] = horowitz_pdf_core(s[i]);
}

const Backend g_avx2{exp_batch_avx2,        log_batch_avx2,    sum_exp_avx2,
                     gauss_cross_sum_avx2,  gauss_cross_moments_avx2,
                     horowitz_cdf_avx2,     horowitz_pdf_avx2};

}  // namespace

const Backend* avx2_backend() {
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &g_avx2;
  return nullptr;
}

#else  // !COPATH_X86

const Backend* avx2_backend() { return nullptr; }

#endif

}  // namespace copath::kernels::detail
