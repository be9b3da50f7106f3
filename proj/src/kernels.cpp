#include "copath/kernels.hpp"

#include <atomic>

#include "kernels_common.hpp"

namespace copath::kernels {

namespace detail {

// ---- scalar reference implementations -------------------------------------
//
// Sums use a fixed 4-lane striping with the reduction (a0+a2)+(a1+a3) and an
// in-order tail, matching the AVX2 lane layout exactly.

void exp_batch_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = exp_core(x[i]);
}

void log_batch_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = log_core(x[i]);
}

double sum_exp_scalar(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += exp_core(x[i]);
    a1 += exp_core(x[i + 1]);
    a2 += exp_core(x[i + 2]);
    a3 += exp_core(x[i + 3]);
  }
  double acc = (a0 + a2) + (a1 + a3);
  for (; i < n; ++i) acc += exp_core(x[i]);
  return acc;
}

void gauss_cross_sum_scalar(const double* x, std::size_t n, double h, double* out) {
  const double invh = 1.0 / h;
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x[k];
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      double s0 = (xk - x[j]) * invh;
      double s1 = (xk - x[j + 1]) * invh;
      double s2 = (xk - x[j + 2]) * invh;
      double s3 = (xk - x[j + 3]) * invh;
      a0 += exp_core((s0 * s0) * -0.5);
      a1 += exp_core((s1 * s1) * -0.5);
      a2 += exp_core((s2 * s2) * -0.5);
      a3 += exp_core((s3 * s3) * -0.5);
    }
    double acc = (a0 + a2) + (a1 + a3);
    for (; j < n; ++j) {
      double s = (xk - x[j]) * invh;
      acc += exp_core((s * s) * -0.5);
    }
    out[k] = acc;
  }
}

void gauss_cross_moments_scalar(const double* x, const double* w, std::size_t n, double h,
                                double* out0, double* out1, double* out2) {
  const double invh = 1.0 / h;
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x[k];
    double e0 = 0, e1 = 0, e2 = 0, e3 = 0;
    double s0acc = 0, s1acc = 0, s2acc = 0, s3acc = 0;
    double w0 = 0, w1 = 0, w2 = 0, w3 = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      double s0 = (xk - x[j]) * invh;
      double s1 = (xk - x[j + 1]) * invh;
      double s2 = (xk - x[j + 2]) * invh;
      double s3 = (xk - x[j + 3]) * invh;
      double g0 = exp_core((s0 * s0) * -0.5);
      double g1 = exp_core((s1 * s1) * -0.5);
      double g2 = exp_core((s2 * s2) * -0.5);
      double g3 = exp_core((s3 * s3) * -0.5);
      double se0 = s0 * g0, se1 = s1 * g1, se2 = s2 * g2, se3 = s3 * g3;
      e0 += g0;
      e1 += g1;
      e2 += g2;
      e3 += g3;
      s0acc += se0;
      s1acc += se1;
      s2acc += se2;
      s3acc += se3;
      w0 += w[j] * se0;
      w1 += w[j + 1] * se1;
      w2 += w[j + 2] * se2;
      w3 += w[j + 3] * se3;
    }
    double m0 = (e0 + e2) + (e1 + e3);
    double m1 = (s0acc + s2acc) + (s1acc + s3acc);
    double m2 = (w0 + w2) + (w1 + w3);
    for (; j < n; ++j) {
      double s = (xk - x[j]) * invh;
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

void horowitz_cdf_scalar(const double* s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = horowitz_cdf_core(s[i]);
}

void horowitz_pdf_scalar(const double* s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = horowitz_pdf_core(s[i]);
}

namespace {
std::atomic<bool> g_force_scalar{false};

inline const Backend* active() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return nullptr;
  static const Backend* simd = avx2_backend();
  return simd;
}
}  // namespace

}  // namespace detail

using namespace detail;

void exp_batch(const double* x, double* y, std::size_t n) {
  if (const Backend* b = active()) return b->exp_batch(x, y, n);
  exp_batch_scalar(x, y, n);
}

void log_batch(const double* x, double* y, std::size_t n) {
  if (const Backend* b = active()) return b->log_batch(x, y, n);
  log_batch_scalar(x, y, n);
}

double sum_exp(const double* x, std::size_t n) {
  if (const Backend* b = active()) return b->sum_exp(x, n);
  return sum_exp_scalar(x, n);
}

void gauss_cross_sum(const double* x, std::size_t n, double h, double* out) {
  if (const Backend* b = active()) return b->gauss_cross_sum(x, n, h, out);
  gauss_cross_sum_scalar(x, n, h, out);
}

void gauss_cross_moments(const double* x, const double* w, std::size_t n, double h,
                         double* out0, double* out1, double* out2) {
  if (const Backend* b = active()) return b->gauss_cross_moments(x, w, n, h, out0, out1, out2);
  gauss_cross_moments_scalar(x, w, n, h, out0, out1, out2);
}

void horowitz_cdf_batch(const double* s, double* out, std::size_t n) {
  if (const Backend* b = active()) return b->horowitz_cdf(s, out, n);
  horowitz_cdf_scalar(s, out, n);
}

void horowitz_pdf_batch(const double* s, double* out, std::size_t n) {
  if (const Backend* b = active()) return b->horowitz_pdf(s, out, n);
  horowitz_pdf_scalar(s, out, n);
}

double exp_one(double x) { return exp_core(x); }
double log_one(double x) { return log_core(x); }
double horowitz_cdf_one(double s) { return horowitz_cdf_core(s); }
double horowitz_pdf_one(double s) { return horowitz_pdf_core(s); }

std::string_view backend_name() { return active() ? "avx2" : "scalar"; }

bool force_scalar(bool on) { return g_force_scalar.exchange(on); }

}  // namespace copath::kernels
