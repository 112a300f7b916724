#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "surfglm/errors.hpp"
#include "surfglm/spline.hpp"

using namespace surfglm;

TEST_CASE("sample quantiles use linear interpolation of order statistics") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(sample_quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(sample_quantile(x, 1.0) == doctest::Approx(5.0));
  CHECK(sample_quantile(x, 0.5) == doctest::Approx(3.0));
  // h = (n-1) p = 0.4: interpolate 40% of the way from 1 to 2.
  CHECK(sample_quantile(x, 0.1) == doctest::Approx(1.4));

  std::vector<double> u = {3, 1, 4, 1, 5, 9, 2, 6};  // unsorted, with a tie
  // sorted: 1 1 2 3 4 5 6 9; h = 7 * 0.25 = 1.75
  CHECK(sample_quantile(u, 0.25) == doctest::Approx(1.75));
  CHECK(sample_quantile(u, 0.33) == doctest::Approx(2.0 + (7 * 0.33 - 2)));

  CHECK(sample_quantile({42.0}, 0.7) == doctest::Approx(42.0));
  CHECK_THROWS_AS(sample_quantile({}, 0.5), DataError);
  CHECK_THROWS_AS(sample_quantile(x, -0.1), ConfigError);
  CHECK_THROWS_AS(sample_quantile(x, 1.5), ConfigError);
}

TEST_CASE("knots sit at the data extremes and tercile quantiles") {
  std::vector<double> x;
  for (int i = 0; i <= 100; ++i) x.push_back(double(i));
  SplineBasis b = make_spline_basis(x);
  CHECK(b.knots[0] == doctest::Approx(0.0));
  CHECK(b.knots[1] == doctest::Approx(sample_quantile(x, 0.33)));
  CHECK(b.knots[2] == doctest::Approx(sample_quantile(x, 0.67)));
  CHECK(b.knots[3] == doctest::Approx(100.0));
  CHECK(b.knots[0] < b.knots[1]);
  CHECK(b.knots[1] < b.knots[2]);
  CHECK(b.knots[2] < b.knots[3]);

  CHECK_THROWS_AS(make_spline_basis({1.0, 1.0, 2.0, 2.0, 3.0}), DataError);
}

TEST_CASE("basis values match the truncated-power construction by hand") {
  SplineBasis b;
  b.knots[0] = 0.0;
  b.knots[1] = 1.0;
  b.knots[2] = 2.0;
  b.knots[3] = 3.0;
  Eigen::VectorXd x(1);
  x << 1.5;
  Eigen::MatrixXd B = ns_basis(x, b);
  REQUIRE(B.rows() == 1);
  REQUIRE(B.cols() == 3);
  // d1 = 1.5^3 / 3 = 1.125, d2 = 0.5^3 / 2 = 0.0625, d3 = 0.
  CHECK(B(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(B(0, 1) == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(B(0, 2) == doctest::Approx(0.0625).epsilon(1e-12));

  // Below the first knot every truncated power vanishes.
  x << -2.0;
  B = ns_basis(x, b);
  CHECK(B(0, 0) == doctest::Approx(-2.0));
  CHECK(B(0, 1) == 0.0);
  CHECK(B(0, 2) == 0.0);
}

TEST_CASE("the basis is exactly linear beyond both boundary knots") {
  std::vector<double> data = {0.0, 0.7, 1.1, 1.9, 2.6, 3.0, 4.0};
  SplineBasis b = make_spline_basis(data);

  // Evaluate on uniform grids outside the boundary knots; second differences
  // of every column must vanish there.
  auto check_linear = [&](double start, double stop) {
    const int n = 30;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x[i] = start + (stop - start) * double(i) / double(n - 1);
    Eigen::MatrixXd B = ns_basis(x, b);
    for (int c = 0; c < 3; ++c)
      for (int i = 2; i < n; ++i) {
        const double d2 = B(i, c) - 2.0 * B(i - 1, c) + B(i - 2, c);
        CHECK(std::abs(d2) < 1e-9);
      }
  };
  check_linear(b.knots[3], b.knots[3] + 5.0);
  check_linear(b.knots[0] - 5.0, b.knots[0]);

  // Strictly inside, the spline must not be linear (otherwise the basis is
  // degenerate): some second difference is clearly nonzero.
  const int n = 30;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x[i] = b.knots[0] + (b.knots[3] - b.knots[0]) * double(i) / double(n - 1);
  Eigen::MatrixXd B = ns_basis(x, b);
  double max_d2 = 0.0;
  for (int c = 1; c < 3; ++c)
    for (int i = 2; i < n; ++i)
      max_d2 = std::max(max_d2,
                        std::abs(B(i, c) - 2.0 * B(i - 1, c) + B(i - 2, c)));
  CHECK(max_d2 > 1e-4);
}

TEST_CASE("a straight line lies in the span of intercept plus basis") {
  std::vector<double> data = {0.1, 0.9, 1.7, 2.4, 3.3, 4.8};
  SplineBasis b = make_spline_basis(data);
  Eigen::VectorXd x(25);
  for (int i = 0; i < 25; ++i) x[i] = -1.0 + 0.3 * i;
  Eigen::VectorXd y = 2.0 * x.array() + 1.0;

  Eigen::MatrixXd D(25, 4);
  D.col(0).setOnes();
  D.rightCols(3) = ns_basis(x, b);
  Eigen::VectorXd coef = D.colPivHouseholderQr().solve(y);
  CHECK((D * coef - y).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(coef[0] - 1.0) < 1e-10);
  CHECK(std::abs(coef[1] - 2.0) < 1e-10);
  CHECK(std::abs(coef[2]) < 1e-10);
  CHECK(std::abs(coef[3]) < 1e-10);
}

TEST_CASE("basis columns are continuous across interior knots") {
  std::vector<double> data = {0.0, 1.0, 2.0, 3.0};
  SplineBasis b = make_spline_basis(data);
  for (double knot : {b.knots[1], b.knots[2]}) {
    Eigen::VectorXd x(2);
    x << knot - 1e-7, knot + 1e-7;
    Eigen::MatrixXd B = ns_basis(x, b);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(B(0, c) - B(1, c)) < 1e-5);
  }
}
