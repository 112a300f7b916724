#pragma once

#include <Eigen/Dense>
#include <functional>

namespace surfglm {

struct BfgsOptions {
  double rel_tol = 1e-6;   // stop when |f_new - f_old| <= rel_tol * (|f_old| + 1)
  double grad_tol = 1e-5;  // or when the inf-norm of the gradient drops below this
  int max_iters = 200;
  double fd_step = 1e-4;   // central-difference step
  int max_backtracks = 40;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
};

/// Quasi-Newton minimization with a numerically differenced gradient
/// (central differences) and Armijo backtracking. Intended for smooth,
/// well-scaled objectives of modest dimension.
BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                         Eigen::VectorXd x0, const BfgsOptions& opts = {});

/// Brent's method for a 1-D minimum on [a, b]; tol is the absolute
/// x-tolerance. Returns the argmin.
double minimize_brent(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-8, int max_iters = 200);

}  // namespace surfglm
