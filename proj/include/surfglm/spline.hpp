#pragma once

#include <Eigen/Dense>
#include <vector>

namespace surfglm {

/// Natural cubic spline basis of dimension 3 (no constant column; models add
/// their own intercept). Knots: boundary at the data min/max, interior at
/// the 33rd and 67th sample quantiles. Natural boundary conditions make the
/// basis exactly linear at and beyond the boundary knots.
struct SplineBasis {
  double knots[4];  // boundary_lo, interior_33, interior_67, boundary_hi

  static constexpr int dimension = 3;
};

/// Linear-interpolation sample quantile (the common "type 7" convention):
/// h = (n-1)p, interpolate between the floor(h)-th and next order statistic.
double sample_quantile(std::vector<double> x, double p);

/// Builds knots from predictor values; requires >= 4 distinct values and
/// strictly increasing knots.
SplineBasis make_spline_basis(const std::vector<double>& x);

/// Evaluates the basis at each entry of x: columns {x, N3, N4} where
/// N_{k+2} = d_k - d_3 and d_k(x) = [(x - k_k)+^3 - (x - k_4)+^3]/(k_4 - k_k),
/// the textbook truncated-power construction reduced to satisfy the natural
/// constraints.
Eigen::MatrixXd ns_basis(const Eigen::VectorXd& x, const SplineBasis& basis);

}  // namespace surfglm
