#pragma once

#include <Eigen/Dense>
#include <vector>

#include "surfglm/prep.hpp"

namespace surfglm {

/// Per-vertex OLS fit of one session's residualized design.
struct ClassicalFit {
  Eigen::MatrixXd beta;    // K x V
  Eigen::MatrixXd se;      // K x V
  Eigen::MatrixXd t;       // K x V
  Eigen::MatrixXd p;       // K x V, two-sided
  Eigen::VectorXd sigma2;  // V, residual variance estimates
  int df = 0;
};

/// Ordinary least squares at every vertex with a shared design matrix.
/// Degrees of freedom are T_kept - n_projected - K, accounting for the
/// nuisance columns removed before fitting. P-values are two-sided from
/// the t distribution on df.
ClassicalFit fit_classical(const SessionData& session);

/// Bonferroni-adjusted rejection: p[i] <= alpha / m.
std::vector<bool> bonferroni_reject(const Eigen::VectorXd& p, double alpha);

/// Benjamini-Hochberg step-up: reject the k* smallest p-values where k* is
/// the largest k with p_(k) <= k * alpha / m (0 if none).
std::vector<bool> bh_reject(const Eigen::VectorXd& p, double alpha);

}  // namespace surfglm
