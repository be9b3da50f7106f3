#pragma once

#include <span>
#include <vector>

namespace copath {

// Clamped (open-uniform) B-spline basis on [lo, hi] evaluated by the
// Cox-de Boor recursion. Weights are non-negative and sum to one; arguments
// outside the interval are clamped before evaluation.
class BSplineBasis {
public:
  BSplineBasis(int degree, std::vector<double> interior_knots, double lo, double hi);

  // Interior knots at equal-mass quantiles of `data`, boundaries at the
  // sample range widened by 1e-6 of the range.
  static BSplineBasis from_quantiles(int degree, int n_interior, std::span<const double> data);

  int size() const { return n_basis_; }
  int degree() const { return degree_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& interior_knots() const { return interior_; }

  // All n_basis weights at x (clamped); out.size() must equal size().
  void eval(double x, std::span<double> out) const;
  void eval_deriv(double x, std::span<double> out) const;

  std::vector<double> eval(double x) const;
  std::vector<double> eval_deriv(double x) const;

  // Knot average; coefficients equal to Greville abscissae reproduce the
  // identity function, which several starting values rely on.
  double greville(int j) const;

private:
  int degree_;
  int n_basis_;
  double lo_, hi_;
  std::vector<double> interior_;
  std::vector<double> knots_;  // length n_basis + degree + 1

  int find_span(double x) const;
};

}  // namespace copath
