#include "copath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "copath/kernels.hpp"

namespace copath {

double horowitz_cdf(double s) { return kernels::horowitz_cdf_one(s); }
double horowitz_pdf(double s) { return kernels::horowitz_pdf_one(s); }

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(n - 1);
    auto idx = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(idx);
    return idx + 1 < n ? sorted[idx] * (1 - frac) + sorted[idx + 1] * frac : sorted[idx];
  };
  double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (iqr == 0.0) spread = sd;  // heavy ties; fall back to sd
  if (spread <= 0.0) throw std::invalid_argument("silverman_bandwidth: zero dispersion");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double kde_gaussian(std::span<const double> points, double bandwidth, double x) {
  if (bandwidth <= 0.0) throw std::invalid_argument("kde_gaussian: bandwidth must be positive");
  const double invh = 1.0 / bandwidth;
  double acc = 0.0;
  for (double p : points) {
    double s = (x - p) * invh;
    acc += kernels::exp_one((s * s) * -0.5);
  }
  const double norm = 1.0 / (static_cast<double>(points.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  return acc * norm;
}

double brent_root(const std::function<double(double)>& f, double a, double b, double tol,
                  int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("brent_root: no sign change in bracket");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= tol) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
  }
  return b;
}

namespace {

// QUADPACK dqk15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b, double& result,
          double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double dx = half * kXgk[j];
    double f1 = f(center - dx);
    double f2 = f(center + dx);
    res_k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
  }
  result = res_k * half;
  err = std::abs((res_k - res_g) * half);
}

}  // namespace

double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -quad_adaptive(f, b, a, tol);
  struct Segment {
    double a, b, value, err;
  };
  double v0, e0;
  gk15(f, a, b, v0, e0);
  std::vector<Segment> segs{{a, b, v0, e0}};
  int splits = 0;
  const int max_splits = 4000;
  while (true) {
    double total_err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total_err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    if (total_err <= tol) break;
    if (++splits > max_splits)
      throw std::runtime_error("quad_adaptive: refinement cap exceeded");
    Segment s = segs[worst];
    double mid = 0.5 * (s.a + s.b);
    Segment l{s.a, mid, 0, 0}, r{mid, s.b, 0, 0};
    gk15(f, l.a, l.b, l.value, l.err);
    gk15(f, r.a, r.b, r.value, r.err);
    segs[worst] = l;
    segs.push_back(r);
  }
  double acc = 0.0;
  for (const auto& s : segs) acc += s.value;
  return acc;
}

std::pair<Eigen::VectorXd, SolverReport> newton_system(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    const Eigen::VectorXd& x0, double tol, int max_iter) {
  Eigen::VectorXd x = x0;
  Eigen::VectorXd F = residual(x);
  double norm = F.lpNorm<Eigen::Infinity>();
  SolverReport rep;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (norm <= tol) {
      rep.converged = true;
      rep.iterations = iter;
      rep.residual_norm = norm;
      return {x, rep};
    }
    Eigen::MatrixXd J = jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      rep.iterations = iter;
      rep.residual_norm = norm;
      rep.message = "singular Jacobian";
      return {x, rep};
    }
    Eigen::VectorXd step = lu.solve(-F);
    double lambda = 1.0;
    Eigen::VectorXd x_new;
    Eigen::VectorXd F_new;
    double norm_new = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving <= 30; ++halving) {
      x_new = x + lambda * step;
      F_new = residual(x_new);
      norm_new = F_new.array().isFinite().all() ? F_new.lpNorm<Eigen::Infinity>()
                                                : std::numeric_limits<double>::infinity();
      if (norm_new < norm) break;
      lambda *= 0.5;
    }
    if (!(norm_new < norm)) {
      rep.iterations = iter;
      rep.residual_norm = norm;
      rep.message = "damping failed to reduce residual";
      return {x, rep};
    }
    x = x_new;
    F = F_new;
    norm = norm_new;
  }
  rep.iterations = max_iter;
  rep.residual_norm = norm;
  rep.converged = norm <= tol;
  if (!rep.converged) rep.message = "iteration cap reached";
  return {x, rep};
}

std::pair<Eigen::VectorXd, SolverReport> minimize_bfgs(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x0, const BfgsOptions& opt) {
  const auto n = x0.size();
  Eigen::VectorXd x = x0;
  double fx = f(x);
  if (!std::isfinite(fx))
    throw std::invalid_argument("minimize_bfgs: objective not finite at start");
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  SolverReport rep;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opt.grad_tol) {
      rep.converged = true;
      break;
    }
    Eigen::VectorXd dir = -(H * g);
    double slope = g.dot(dir);
    if (slope >= 0) {  // rebuild when curvature estimate goes bad
      H.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rep.message = "line search failed";
      break;
    }
    Eigen::VectorXd g_new = grad(x_new);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd yv = g_new - g;
    double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      // BFGS inverse update
      Eigen::VectorXd Hy = H * yv;
      double yHy = yv.dot(Hy);
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    double rel_impr = std::abs(fx - f_new) / std::max(1.0, std::abs(fx));
    x = x_new;
    fx = f_new;
    g = g_new;
    if (rel_impr < opt.f_tol) {
      rep.converged = true;
      ++iter;
      break;
    }
  }
  rep.iterations = iter;
  rep.residual_norm = g.lpNorm<Eigen::Infinity>();
  if (iter >= opt.max_iter) rep.message = "iteration cap reached";
  return {x, rep};
}

std::pair<Eigen::VectorXd, SolverReport> minimize_constrained(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::MatrixXd& A, const Eigen::VectorXd& c, const Eigen::VectorXd& x0, double tol) {
  Eigen::VectorXd slack0 = A * x0 - c;
  if (A.rows() > 0 && slack0.minCoeff() <= 0.0)
    throw std::invalid_argument("minimize_constrained: infeasible start");

  Eigen::VectorXd x = x0;
  SolverReport rep;
  double mu = 1e-2 * std::max(1.0, std::abs(objective(x0)));
  const double mu_floor = std::min(1e-10, 0.01 * tol);
  int total_iter = 0;
  while (true) {
    auto barrier_f = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd slack = A * v - c;
      if (A.rows() > 0 && slack.minCoeff() <= 0.0)
        return std::numeric_limits<double>::infinity();
      double pen = 0.0;
      for (Eigen::Index i = 0; i < slack.size(); ++i) pen -= std::log(slack[i]);
      return objective(v) + mu * pen;
    };
    auto barrier_g = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd g = gradient(v);
      if (A.rows() > 0) {
        Eigen::VectorXd slack = A * v - c;
        g -= mu * (A.transpose() * slack.cwiseInverse());
      }
      return g;
    };
    BfgsOptions opt;
    opt.max_iter = 300;
    opt.grad_tol = std::max(tol, 0.1 * mu);
    opt.f_tol = 1e-14;
    auto [xin, inner] = minimize_bfgs(barrier_f, barrier_g, x, opt);
    x = xin;
    total_iter += inner.iterations;
    if (mu <= mu_floor) break;
    mu = std::max(mu * 0.1, mu_floor);
  }
  rep.iterations = total_iter;
  // stationarity of the true objective projected off near-active constraints
  Eigen::VectorXd g = gradient(x);
  if (A.rows() > 0) {
    Eigen::VectorXd slack = A * x - c;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < slack.size(); ++i)
      if (slack[i] < 1e-6 * (1.0 + std::abs(c[i]))) active.push_back(i);
    if (!active.empty()) {
      Eigen::MatrixXd Aact(active.size(), A.cols());
      for (std::size_t k = 0; k < active.size(); ++k) Aact.row(k) = A.row(active[k]);
      // project gradient onto null space of active constraints
      Eigen::MatrixXd AAt = Aact * Aact.transpose();
      Eigen::VectorXd lam = AAt.ldlt().solve(Aact * g);
      g -= Aact.transpose() * lam;
    }
  }
  rep.residual_norm = g.lpNorm<Eigen::Infinity>();
  rep.converged = true;
  return {x, rep};
}

std::pair<Eigen::VectorXd, SolverReport> nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
    double scale, const NelderMeadOptions& opt) {
  const auto n = x0.size();
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += scale;
  for (Eigen::Index i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  auto order = [&] {
    for (Eigen::Index i = 1; i <= n; ++i) {
      Eigen::VectorXd p = pts[i];
      double v = fv[i];
      Eigen::Index j = i;
      while (j > 0 && fv[j - 1] > v) {
        pts[j] = pts[j - 1];
        fv[j] = fv[j - 1];
        --j;
      }
      pts[j] = p;
      fv[j] = v;
    }
  };
  order();
  SolverReport rep;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    double spread = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i)
      spread = std::max(spread, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    if (std::abs(fv[n] - fv[0]) <= opt.f_tol * (1.0 + std::abs(fv[0])) && spread <= opt.x_tol) {
      rep.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);
    Eigen::VectorXd xr = centroid + (centroid - pts[n]);
    double fr = f(xr);
    if (fr < fv[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[n]);
      double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (pts[n] - centroid);
      double fc = f(xc);
      if (fc < fv[n]) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          fv[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  rep.iterations = iter;
  rep.residual_norm = std::abs(fv[n] - fv[0]);
  if (iter >= opt.max_iter) rep.message = "iteration cap reached";
  return {pts[0], rep};
}

}  // namespace copath
