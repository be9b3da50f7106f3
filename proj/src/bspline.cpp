#include "copath/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace copath {

BSplineBasis::BSplineBasis(int degree, std::vector<double> interior_knots, double lo, double hi)
    : degree_(degree), lo_(lo), hi_(hi), interior_(std::move(interior_knots)) {
  if (degree < 0) throw std::invalid_argument("bspline: negative degree");
  if (!(lo < hi)) throw std::invalid_argument("bspline: degenerate knot vector (lo >= hi)");
  if (!std::is_sorted(interior_.begin(), interior_.end()))
    throw std::invalid_argument("bspline: interior knots not sorted");
  for (double k : interior_)
    if (!(k > lo && k < hi))
      throw std::invalid_argument("bspline: interior knot outside (lo, hi)");
  n_basis_ = degree_ + 1 + static_cast<int>(interior_.size());
  knots_.reserve(n_basis_ + degree_ + 1);
  knots_.insert(knots_.end(), degree_ + 1, lo_);
  knots_.insert(knots_.end(), interior_.begin(), interior_.end());
  knots_.insert(knots_.end(), degree_ + 1, hi_);
}

BSplineBasis BSplineBasis::from_quantiles(int degree, int n_interior,
                                          std::span<const double> data) {
  if (data.size() < 2) throw std::invalid_argument("bspline: need at least 2 data points");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = sorted.front(), hi = sorted.back();
  if (!(lo < hi)) throw std::invalid_argument("bspline: degenerate data range");
  double pad = 1e-6 * (hi - lo);
  std::vector<double> interior(n_interior);
  for (int i = 0; i < n_interior; ++i) {
    double q = static_cast<double>(i + 1) / (n_interior + 1);
    // type-7 interpolated quantile
    double pos = q * (sorted.size() - 1);
    auto idx = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(idx);
    interior[i] = idx + 1 < sorted.size() ? sorted[idx] * (1 - frac) + sorted[idx + 1] * frac
                                          : sorted[idx];
  }
  return BSplineBasis(degree, std::move(interior), lo - pad, hi + pad);
}

int BSplineBasis::find_span(double x) const {
  // index i with knots_[i] <= x < knots_[i+1], clamped to valid basis spans
  int lo_span = degree_;
  int hi_span = n_basis_ - 1;
  if (x >= knots_[hi_span + 1]) return hi_span;
  if (x <= knots_[lo_span]) return lo_span;
  auto it = std::upper_bound(knots_.begin() + lo_span, knots_.begin() + hi_span + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

void BSplineBasis::eval(double x, std::span<double> out) const {
  if (static_cast<int>(out.size()) != n_basis_)
    throw std::invalid_argument("bspline: output span size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  x = std::clamp(x, lo_, hi_);
  const int span = find_span(x);
  // de Boor: N[r] holds N_{span-deg+r, deg}
  double N[16];  // degree <= 15 is far beyond anything used here
  double left[16], right[16];
  N[0] = 1.0;
  for (int j = 1; j <= degree_; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[r + 1] + left[j - r];
      double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  for (int r = 0; r <= degree_; ++r) out[span - degree_ + r] = N[r];
}

void BSplineBasis::eval_deriv(double x, std::span<double> out) const {
  if (static_cast<int>(out.size()) != n_basis_)
    throw std::invalid_argument("bspline: output span size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  if (degree_ == 0) return;
  x = std::clamp(x, lo_, hi_);
  const int span = find_span(x);
  // basis of degree p-1 on the same knot vector
  double N[16], left[16], right[16];
  N[0] = 1.0;
  for (int j = 1; j <= degree_ - 1; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[r + 1] + left[j - r];
      double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  // N'_{i,p} = p * ( N_{i,p-1}/(t_{i+p}-t_i) - N_{i+1,p-1}/(t_{i+p+1}-t_{i+1}) );
  // N_{i,p-1} feeds +N'_{i,p} and -N'_{i-1,p}, both scaled by t_{i+p}-t_i.
  const int p = degree_;
  for (int r = 0; r <= p - 1; ++r) {
    int i = span - p + 1 + r;  // N[r] corresponds to N_{i, p-1}
    double d = knots_[i + p] - knots_[i];
    if (d == 0.0) continue;
    double c = p * N[r] / d;
    if (i - 1 >= 0) out[i - 1] -= c;
    if (i < n_basis_) out[i] += c;
  }
}

std::vector<double> BSplineBasis::eval(double x) const {
  std::vector<double> out(n_basis_);
  eval(x, out);
  return out;
}

std::vector<double> BSplineBasis::eval_deriv(double x) const {
  std::vector<double> out(n_basis_);
  eval_deriv(x, out);
  return out;
}

double BSplineBasis::greville(int j) const {
  double s = 0.0;
  for (int i = 1; i <= degree_; ++i) s += knots_[j + i];
  return degree_ > 0 ? s / degree_ : 0.5 * (knots_[j] + knots_[j + 1]);
}

}  // namespace copath
