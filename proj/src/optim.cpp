#include "surfglm/optim.hpp"

#include <cmath>
#include <limits>

#include "surfglm/errors.hpp"

namespace surfglm {

namespace {

Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double h, int& n_evals) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
    n_evals += 2;
  }
  return g;
}

}  // namespace

BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                         Eigen::VectorXd x0, const BfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.f = f(res.x);
  res.n_evals = 1;
  if (!std::isfinite(res.f))
    throw NumericalError("minimize_bfgs: objective not finite at start");

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian approx
  Eigen::VectorXd g = central_gradient(f, res.x, opts.fd_step, res.n_evals);

  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd d = -(H * g);
    double slope = g.dot(d);
    if (slope >= 0.0) {  // bad curvature estimate; reset to steepest descent
      H.setIdentity();
      d = -g;
      slope = g.dot(d);
    }

    // Armijo backtracking from a unit step.
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + step * d;
      f_new = f(x_new);
      ++res.n_evals;
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = g.lpNorm<Eigen::Infinity>() <= 1e2 * opts.grad_tol;
      break;  // no descent possible at this scale
    }

    Eigen::VectorXd g_new = central_gradient(f, x_new, opts.fd_step, res.n_evals);
    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }

    const double df = std::abs(res.f - f_new);
    res.x = std::move(x_new);
    res.f = f_new;
    g = std::move(g_new);
    if (df <= opts.rel_tol * (std::abs(res.f) + 1.0)) {
      res.converged = true;
      break;
    }
  }
  res.gradient = g;
  return res;
}

double minimize_brent(const std::function<double(double)>& f, double a, double b,
                      double tol, int max_iters) {
  if (!(a < b)) throw ConfigError("minimize_brent: need a < b");
  const double gold = 0.5 * (3.0 - std::sqrt(5.0));
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < max_iters; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol + 1e-12 * std::abs(x);
    if (std::abs(x - m) <= 2.0 * tol1 - 0.5 * (b - a)) break;

    bool parabolic = false;
    if (std::abs(e) > tol1) {
      // Parabolic interpolation through (x, fx), (w, fw), (v, fv).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x)) {
        e = d;
        d = p / q;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = gold * e;
    }
    double u = x + ((std::abs(d) >= tol1) ? d : (d > 0 ? tol1 : -tol1));
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return x;
}

}  // namespace surfglm
