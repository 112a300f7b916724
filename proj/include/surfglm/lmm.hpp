#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace surfglm {

/// One optimized solution of the random-intercept model
/// y_ij = x_ij' beta + b_i + e_ij, b_i ~ N(0, sigma_b^2), e ~ N(0, sigma^2),
/// under either the full (ML) or restricted (REML) likelihood.
struct LmmSolution {
  Eigen::VectorXd fixed_effects;
  Eigen::MatrixXd fixed_cov;  // sigma^2-scaled GLS information inverse
  double lambda = 0.0;        // sigma_b^2 / sigma^2
  double random_intercept_var = 0.0;
  double residual_var = 0.0;
  double loglik = 0.0;
};

struct LmmFit {
  LmmSolution ml;
  LmmSolution reml;
  int n_obs = 0;
  int n_subjects = 0;
  std::vector<std::string> term_names;  // one per fixed-effect column

  int n_fixed() const { return static_cast<int>(ml.fixed_effects.size()); }
};

/// Fits the random-intercept model by profiling the fixed effects and the
/// residual variance out of the likelihood and searching the variance ratio
/// lambda over log lambda in [-12, 12] (grid + local refinement), with the
/// exact lambda = 0 boundary always considered. Both ML and REML solutions
/// are returned: ML feeds likelihood-ratio tests and AIC, REML the reported
/// estimates and coefficient curves.
LmmFit fit_random_intercept(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<int>& group,
                            std::vector<std::string> term_names = {});

/// Same model with the variance ratio pinned (lambda >= 0); used for
/// boundary checks and profiling diagnostics.
LmmSolution solve_at_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<int>& group, double lambda,
                            bool reml);

/// Best linear unbiased predictions of the per-subject intercept deviations.
Eigen::VectorXd random_intercept_blups(const LmmSolution& sol,
                                       const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y,
                                       const std::vector<int>& group);

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Likelihood-ratio test of nested fits (ML likelihoods, same data).
LrtResult lrt(const LmmFit& null_fit, const LmmFit& alt_fit);

/// Akaike information criterion from the ML solution: -2 loglik + 2 p with
/// p = number of fixed effects + 2 variance parameters.
double aic(const LmmFit& fit);

}  // namespace surfglm
