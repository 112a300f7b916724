#include "surfglm/spline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "surfglm/errors.hpp"

namespace surfglm {

double sample_quantile(std::vector<double> x, double p) {
  if (x.empty()) throw DataError("sample_quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw ConfigError("sample_quantile: p must be in [0, 1]");
  std::sort(x.begin(), x.end());
  const double h = (double(x.size()) - 1.0) * p;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, x.size() - 1);
  const double w = h - double(lo);
  return (1.0 - w) * x[lo] + w * x[hi];
}

SplineBasis make_spline_basis(const std::vector<double>& x) {
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 4)
    throw DataError("make_spline_basis: need at least 4 distinct predictor values");

  SplineBasis b;
  b.knots[0] = *distinct.begin();
  b.knots[1] = sample_quantile(x, 0.33);
  b.knots[2] = sample_quantile(x, 0.67);
  b.knots[3] = *distinct.rbegin();
  for (int i = 0; i < 3; ++i)
    if (!(b.knots[i] < b.knots[i + 1]))
      throw DataError("make_spline_basis: coincident knots (predictor too discrete)");
  return b;
}

namespace {
inline double pos_cube(double t) { return t > 0.0 ? t * t * t : 0.0; }
}  // namespace

Eigen::MatrixXd ns_basis(const Eigen::VectorXd& x, const SplineBasis& basis) {
  const double k1 = basis.knots[0], k2 = basis.knots[1], k3 = basis.knots[2],
               k4 = basis.knots[3];
  auto d = [&](double xi, double kk) {
    return (pos_cube(xi - kk) - pos_cube(xi - k4)) / (k4 - kk);
  };
  Eigen::MatrixXd B(x.size(), SplineBasis::dimension);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double d3 = d(xi, k3);
    B(i, 0) = xi;
    B(i, 1) = d(xi, k1) - d3;
    B(i, 2) = d(xi, k2) - d3;
  }
  return B;
}

}  // namespace surfglm
