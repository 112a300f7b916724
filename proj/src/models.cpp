#include "surfglm/models.hpp"

#include <algorithm>
#include <cmath>

#include "surfglm/errors.hpp"

namespace surfglm {

std::string to_string(LmmSpec spec) {
  switch (spec) {
    case LmmSpec::AlsTotalSpline: return "als-total-spline";
    case LmmSpec::AlsTotalLinear: return "als-total-linear";
    case LmmSpec::AlsHandOtherSpline: return "als-hand-other-spline";
    case LmmSpec::AlsHandOtherLinear: return "als-hand-other-linear";
    case LmmSpec::HcIntercept: return "hc-intercept";
  }
  return "?";
}

namespace {

const Eigen::VectorXd& primary_predictor(LmmSpec spec, const ModelData& d) {
  switch (spec) {
    case LmmSpec::AlsTotalSpline:
    case LmmSpec::AlsTotalLinear:
      return d.d_total;
    default:
      return d.d_hand;
  }
}

bool uses_spline(LmmSpec spec) {
  return spec == LmmSpec::AlsTotalSpline || spec == LmmSpec::AlsHandOtherSpline;
}

bool uses_other(LmmSpec spec) {
  return spec == LmmSpec::AlsHandOtherSpline || spec == LmmSpec::AlsHandOtherLinear;
}

}  // namespace

BuiltDesign build_design(LmmSpec spec, const ModelData& data) {
  const Eigen::Index n = data.response.size();
  if (n == 0) throw DataError("build_design: no observations");

  BuiltDesign out;
  std::vector<Eigen::VectorXd> cols;
  cols.push_back(Eigen::VectorXd::Ones(n));
  out.names.push_back("(intercept)");

  if (spec != LmmSpec::HcIntercept) {
    const Eigen::VectorXd& x = primary_predictor(spec, data);
    if (x.size() != n) throw DataError("build_design: predictor length mismatch");
    const char* base = (spec == LmmSpec::AlsTotalSpline || spec == LmmSpec::AlsTotalLinear)
                           ? "d_total" : "d_hand";
    if (uses_spline(spec)) {
      std::vector<double> xv(x.data(), x.data() + n);
      out.basis = make_spline_basis(xv);
      Eigen::MatrixXd B = ns_basis(x, *out.basis);
      for (int j = 0; j < SplineBasis::dimension; ++j) {
        cols.push_back(B.col(j));
        out.names.push_back(std::string(base) + ".ns" + std::to_string(j + 1));
      }
    } else {
      cols.push_back(x);
      out.names.push_back(base);
    }
    if (uses_other(spec)) {
      if (data.d_other.size() != n)
        throw DataError("build_design: other-disability length mismatch");
      if (data.d_other.cwiseAbs().maxCoeff() == 0.0) {
        out.dropped_other = true;
      } else {
        cols.push_back(data.d_other);
        out.names.push_back("d_other");
      }
    }
  }

  out.X.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    out.X.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

ModelFit fit_model(LmmSpec spec, const ModelData& data) {
  ModelFit m;
  m.spec = spec;
  m.design = build_design(spec, data);
  m.fit = fit_random_intercept(m.design.X, data.response, data.subject_index,
                               m.design.names);
  return m;
}

std::vector<CurvePoint> coefficient_curve(const ModelFit& model,
                                          const Eigen::VectorXd& grid,
                                          double held_other) {
  const LmmSolution& sol = model.fit.reml;
  const Eigen::Index p = sol.fixed_effects.size();
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<size_t>(grid.size()));

  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(p);
    Eigen::Index c = 0;
    row[c++] = 1.0;
    CurvePoint pt;
    pt.x = grid[i];
    if (model.spec != LmmSpec::HcIntercept) {
      if (uses_spline(model.spec)) {
        Eigen::VectorXd xi(1);
        xi[0] = grid[i];
        Eigen::MatrixXd B = ns_basis(xi, *model.design.basis);
        for (int j = 0; j < SplineBasis::dimension; ++j) row[c++] = B(0, j);
        pt.extrapolated =
            grid[i] < model.design.basis->knots[0] || grid[i] > model.design.basis->knots[3];
      } else {
        row[c++] = grid[i];
      }
      if (uses_other(model.spec) && !model.design.dropped_other) row[c++] = held_other;
    }
    if (c != p)
      throw NumericalError("coefficient_curve: design row/coefficient mismatch");

    pt.mean = row.dot(sol.fixed_effects);
    const double var = row * sol.fixed_cov * row.transpose();
    pt.se = var > 0.0 ? std::sqrt(var) : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

Eigen::VectorXd curve_grid(const Eigen::VectorXd& predictor, int n,
                           double upper_quantile) {
  if (n < 2) throw ConfigError("curve_grid: need at least 2 points");
  std::vector<double> xv(predictor.data(), predictor.data() + predictor.size());
  const double lo = *std::min_element(xv.begin(), xv.end());
  const double hi = sample_quantile(xv, upper_quantile);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return g;
}

}  // namespace surfglm
