#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>

namespace copath {

struct SolverReport {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::string message;
};

// Horowitz (1998) smooth kernel CDF; K(-1)=0, K(0)=1/2, K(1)=1.
double horowitz_cdf(double s);
double horowitz_pdf(double s);

// 0.9 * min(sd, IQR/1.34) * n^(-1/5). Throws on zero dispersion.
double silverman_bandwidth(std::span<const double> values);

// Gaussian KDE evaluated at one point: (1/(n h)) sum_i phi((x - p_i)/h).
double kde_gaussian(std::span<const double> points, double bandwidth, double x);

// Brent root finder; requires f(a) f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b, double tol,
                  int max_iter = 200);

// Adaptive Gauss-Kronrod (7,15) quadrature with absolute tolerance.
// quad(a,b) == -quad(b,a).
double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol);

// Damped Newton for F(x) = 0 with analytic Jacobian (step halving when the
// residual sup-norm fails to decrease).
std::pair<Eigen::VectorXd, SolverReport> newton_system(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    const Eigen::VectorXd& x0, double tol, int max_iter);

// Minimize f subject to A x >= c via a log-barrier interior-point scheme with
// BFGS inner iterations. x0 must be strictly feasible. Deterministic.
std::pair<Eigen::VectorXd, SolverReport> minimize_constrained(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::MatrixXd& A, const Eigen::VectorXd& c, const Eigen::VectorXd& x0, double tol);

// --- generic unconstrained helpers used across the estimator ---------------

struct BfgsOptions {
  int max_iter = 500;
  double grad_tol = 1e-8;
  double f_tol = 1e-12;  // relative improvement stop
};

// Minimizes f; objective may return +inf to reject a point (line search backs
// off). Gradient is evaluated only at accepted points.
std::pair<Eigen::VectorXd, SolverReport> minimize_bfgs(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x0, const BfgsOptions& opt = {});

struct NelderMeadOptions {
  int max_iter = 4000;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
};

std::pair<Eigen::VectorXd, SolverReport> nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
    double scale, const NelderMeadOptions& opt = {});

}  // namespace copath
