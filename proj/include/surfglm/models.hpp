#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "surfglm/lmm.hpp"
#include "surfglm/spline.hpp"

namespace surfglm {

/// Mixed-model variants for activation area vs disability. "Spline" uses the
/// 3-dimensional natural cubic basis on the named predictor; "Linear" the
/// raw predictor. All include an intercept and a per-subject random
/// intercept; the hand-motor variants add other-disability as a linear term.
enum class LmmSpec {
  AlsTotalSpline,
  AlsTotalLinear,
  AlsHandOtherSpline,
  AlsHandOtherLinear,
  HcIntercept,
};

std::string to_string(LmmSpec spec);

/// Aligned rows: one observation (subject-visit) each.
struct ModelData {
  Eigen::VectorXd response;
  Eigen::VectorXd d_total;
  Eigen::VectorXd d_hand;
  Eigen::VectorXd d_other;
  std::vector<int> subject_index;
};

struct BuiltDesign {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  std::optional<SplineBasis> basis;
  bool dropped_other = false;  // other-disability column was identically 0
};

/// Builds the fixed-effects design for a variant. A predictor column that is
/// identically zero is dropped (its coefficient is unidentifiable), so a
/// hand+other fit degenerates gracefully to the hand-only model.
BuiltDesign build_design(LmmSpec spec, const ModelData& data);

struct ModelFit {
  LmmSpec spec;
  BuiltDesign design;
  LmmFit fit;
};

ModelFit fit_model(LmmSpec spec, const ModelData& data);

struct CurvePoint {
  double x = 0.0;
  double mean = 0.0;
  double se = 0.0;
  bool extrapolated = false;  // outside the boundary knots
};

/// Predicted mean and standard error along a grid of the primary predictor,
/// other predictors held fixed (REML estimates). The intercept is included,
/// so the curve is the model-implied population mean.
std::vector<CurvePoint> coefficient_curve(const ModelFit& model,
                                          const Eigen::VectorXd& grid,
                                          double held_other = 0.0);

/// Grid spanning the data range of the primary predictor up to the given
/// quantile (as used for plotting), n points.
Eigen::VectorXd curve_grid(const Eigen::VectorXd& predictor, int n,
                           double upper_quantile = 0.9);

}  // namespace surfglm
