#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "surfglm/bayes.hpp"
#include "surfglm/rng.hpp"

namespace surfglm {

struct ExcursionOptions {
  double gamma = 0.0;       // activation threshold on the amplitude scale
  double alpha = 0.05;      // joint (family-wise) error level
  int n_samples = 5000;     // Monte Carlo draws from the joint posterior
  std::uint64_t seed = 0;   // recorded in the result; draws are reproducible
};

struct ExcursionResult {
  double gamma = 0.0;
  double alpha = 0.05;
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<bool> active;       // per vertex, in the fitted (masked) space
  Eigen::VectorXd marginal_prob;  // per vertex, P(beta_v > gamma)
  double joint_prob = 1.0;        // P(min over active set > gamma), estimated
  double joint_prob_se = 0.0;     // binomial standard error of the estimate
  int n_active = 0;
  bool mc_warning = false;  // n_samples too small for alpha (MC se > alpha/4)

  int n_vertices() const { return static_cast<int>(active.size()); }
};

/// Joint-posterior excursion set for one task's amplitude field: the largest
/// prefix of vertices (ordered by marginal exceedance probability, ties by
/// index) whose joint probability of all exceeding gamma stays >= 1 - alpha.
/// Every vertex in the returned set is simultaneously above gamma with
/// posterior probability at least 1 - alpha, which controls the family-wise
/// error of the activation map. One-sided, positive direction.
ExcursionResult excursion_set(const SessionPosterior& post, int task,
                              const ExcursionOptions& opts);

/// Same computation starting from precomputed posterior draws (n_samples x V),
/// used both internally and by simulation tests.
ExcursionResult excursion_set_from_draws(const Eigen::MatrixXd& draws,
                                         const ExcursionOptions& opts);

/// Excursion sets for several thresholds on one fit, sharing a single set of
/// posterior draws. Computed in ascending threshold order with each set's
/// candidates restricted to the previous set, so the family is exactly
/// nested: a higher threshold's set is a subset of every lower one's. Each
/// set still carries its own joint-probability certificate. Results are
/// returned in the order of `gammas`; opts.gamma is ignored.
std::vector<ExcursionResult> excursion_family(const SessionPosterior& post,
                                              int task,
                                              const std::vector<double>& gammas,
                                              const ExcursionOptions& opts);

std::vector<ExcursionResult> excursion_family_from_draws(
    const Eigen::MatrixXd& draws, const std::vector<double>& gammas,
    const ExcursionOptions& opts);

}  // namespace surfglm
