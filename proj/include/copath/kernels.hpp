#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops shared by the demand, equilibrium, and estimator
// code: elementwise exp/log, fused exp-sums, Gaussian kernel cross sums, and
// the Horowitz kernel CDF. Every kernel has a scalar reference implementation
// and an AVX2 variant selected once at startup; the two are written with the
// same operation order (FMA included) so they agree bit for bit, which the
// equivalence tests assert.
namespace copath::kernels {

// Elementwise y[i] = exp(x[i]). Inputs are saturated to [-708, 708].
void exp_batch(const double* x, double* y, std::size_t n);

// Elementwise y[i] = log(x[i]); x <= 0 or non-finite yields NaN.
void log_batch(const double* x, double* y, std::size_t n);

// Sum of exp(x[i]) with a fixed 4-lane striped accumulation order.
double sum_exp(const double* x, std::size_t n);

// out[k] = sum_j exp(-0.5 * ((x[k]-x[j])/h)^2)   (raw sums; no 1/(n h sqrt(2pi)))
void gauss_cross_sum(const double* x, std::size_t n, double h, double* out);

// One O(n^2) pass producing, for each k with s_kj = (x[k]-x[j])/h and
// e_kj = exp(-0.5 s_kj^2):
//   out0[k] = sum_j e_kj
//   out1[k] = sum_j s_kj * e_kj
//   out2[k] = sum_j w[j] * s_kj * e_kj
// Used by the profile-likelihood gradient.
void gauss_cross_moments(const double* x, const double* w, std::size_t n, double h,
                         double* out0, double* out1, double* out2);

// Horowitz (1998) smooth kernel CDF and its derivative, elementwise.
void horowitz_cdf_batch(const double* s, double* out, std::size_t n);
void horowitz_pdf_batch(const double* s, double* out, std::size_t n);

// Scalar one-off conveniences (same code path as the batch scalar reference).
double exp_one(double x);
double log_one(double x);
double horowitz_cdf_one(double s);
double horowitz_pdf_one(double s);

// Which backend is live ("scalar" or "avx2").
std::string_view backend_name();

// Force the scalar reference path (tests use this to compare backends).
// Returns the previous setting.
bool force_scalar(bool on);

}  // namespace copath::kernels
