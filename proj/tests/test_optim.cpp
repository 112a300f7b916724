#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "surfglm/optim.hpp"

using namespace surfglm;

TEST_CASE("bfgs minimizes a shifted quadratic exactly") {
  Eigen::MatrixXd A(3, 3);
  A << 4, 1, 0, 1, 3, -1, 0, -1, 2;  // SPD
  const Eigen::Vector3d c(1.0, -2.0, 0.5);
  auto f = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd d = x - c;
    return 0.5 * d.dot(A * d) + 7.0;
  };
  BfgsResult res = minimize_bfgs(f, Eigen::VectorXd::Zero(3));
  CHECK(res.converged);
  CHECK((res.x - c).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(res.f == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(res.n_evals > 0);
}

TEST_CASE("bfgs solves the 2-d rosenbrock valley") {
  auto f = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  BfgsOptions opts;
  opts.max_iters = 500;
  opts.rel_tol = 1e-12;
  opts.grad_tol = 1e-7;
  BfgsResult res = minimize_bfgs(f, Eigen::VectorXd::Constant(2, -1.2), opts);
  CHECK(res.converged);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(res.x[1] - 1.0) < 1e-4);
}

TEST_CASE("bfgs handles a 1-d objective and reports the gradient") {
  auto f = [](const Eigen::VectorXd& x) { return std::cosh(x[0] - 0.25); };
  BfgsResult res = minimize_bfgs(f, Eigen::VectorXd::Constant(1, 3.0));
  CHECK(res.converged);
  CHECK(std::abs(res.x[0] - 0.25) < 1e-4);
  CHECK(std::abs(res.gradient[0]) < 1e-4);
}

TEST_CASE("bfgs respects the iteration cap") {
  auto f = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  BfgsOptions opts;
  opts.max_iters = 2;
  opts.rel_tol = 0.0;
  opts.grad_tol = 0.0;
  BfgsResult res = minimize_bfgs(f, Eigen::VectorXd::Constant(2, -1.2), opts);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations <= 2);
}

TEST_CASE("brent finds interior and boundary-adjacent minima") {
  auto parab = [](double x) { return (x - 2.0) * (x - 2.0); };
  CHECK(std::abs(minimize_brent(parab, 0.0, 5.0) - 2.0) < 1e-7);

  // Minimum close to an endpoint of the bracket.
  auto steep = [](double x) { return std::exp(x); };
  CHECK(minimize_brent(steep, 0.0, 4.0) < 1e-5);

  // Non-quadratic objective with a known argmin: x log x on (0, 1].
  auto xlogx = [](double x) { return x * std::log(x); };
  CHECK(std::abs(minimize_brent(xlogx, 1e-6, 1.0) - std::exp(-1.0)) < 1e-6);
}
