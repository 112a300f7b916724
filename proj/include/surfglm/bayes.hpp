#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "surfglm/chol.hpp"
#include "surfglm/fem.hpp"
#include "surfglm/prep.hpp"

namespace surfglm {

/// SPDE hyperparameters: one (kappa, tau) pair per task regressor plus a
/// shared noise variance. kappa controls spatial range, tau overall
/// precision; marginal field variance is approximately 1/(4 pi kappa^2 tau).
struct Hyperparameters {
  Eigen::VectorXd kappa;
  Eigen::VectorXd tau;
  double sigma2 = 1.0;

  int n_tasks() const { return static_cast<int>(kappa.size()); }
  Eigen::VectorXd pack_log() const;
  static Hyperparameters unpack_log(const Eigen::VectorXd& psi, int K);
};

/// Priors used for MAP estimation, all on natural scales: log-normal on each
/// kappa and tau, Gamma(shape, rate) on the noise precision 1/sigma2.
/// With flat = true the marginal likelihood alone is maximized.
struct HyperPriors {
  bool flat = false;
  double log_kappa_mean = 0.0;
  double log_kappa_sd = 2.0;
  double log_tau_mean = 0.0;
  double log_tau_sd = 2.0;
  double precision_shape = 0.01;
  double precision_rate = 0.01;

  double log_density_psi(const Eigen::VectorXd& psi, int K) const;
};

/// Sufficient statistics of one session for the marginal likelihood:
/// S = X'X (K x K), U = Y'X (V x K), yy = sum of squares of Y, T volumes.
/// Once computed, likelihood evaluations never touch the T x V data again.
struct SessionStats {
  Eigen::MatrixXd S;
  Eigen::MatrixXd U;
  double yy = 0.0;
  int T = 0;
};

SessionStats session_stats(const SessionData& session);

/// Posterior of one session's amplitude fields at fixed hyperparameters.
/// mu is V x K (column k = task k); chol factors the joint posterior
/// precision over the stacked coefficient vector (task blocks of length V),
/// so a draw is vec(mu) + chol->unwhiten(z).
struct SessionPosterior {
  Eigen::MatrixXd mu;
  std::shared_ptr<SparseChol> chol;
  double sigma2 = 0.0;

  Eigen::MatrixXd sample(rng::Engine& eng) const;  // V x K draw
};

/// Shared machinery for repeated marginal-likelihood evaluations over a set
/// of sessions with common mesh and task count. Not thread-safe: the
/// symbolic factorization workspace is reused across calls.
class BayesContext {
 public:
  BayesContext(const FemMatrices& fem, std::vector<SessionStats> stats);

  int n_vertices() const { return V_; }
  int n_tasks() const { return K_; }
  int n_sessions() const { return static_cast<int>(stats_.size()); }
  const std::vector<SessionStats>& stats() const { return stats_; }

  /// Sum over sessions of the exact log marginal likelihood log p(y_j | theta).
  double log_marginal(const Hyperparameters& theta) const;

  /// Negative (log marginal + log prior on psi); the MAP objective.
  double map_objective(const Eigen::VectorXd& psi, const HyperPriors& priors) const;

  SessionPosterior posterior(const Hyperparameters& theta, int session) const;

 private:
  struct Eval {
    double log_marginal;
    std::vector<SparseMat> Q_prior;
    double logdet_prior;  // sum over tasks
  };
  SparseMat assemble_posterior_precision(const std::vector<SparseMat>& Q_prior,
                                         const SessionStats& st, double sigma2) const;
  void prior_factors(const Hyperparameters& theta, std::vector<SparseMat>& Q_out,
                     double& logdet_out) const;

  std::vector<SessionStats> stats_;
  SpdePrecisionBuilder builder_;
  int V_ = 0;
  int K_ = 0;
  mutable SparseChol chol_prior_;   // pattern of one task block
  mutable SparseChol chol_post_;    // pattern of the stacked system
  mutable bool prior_analyzed_ = false;
  mutable bool post_analyzed_ = false;
};

struct BayesFitOptions {
  HyperPriors priors;
  double rel_tol = 1e-6;
  int max_iters = 200;
  double fd_step = 1e-4;
};

struct BayesFit {
  Hyperparameters theta;
  double log_marginal = 0.0;  // at theta
  double objective = 0.0;     // MAP objective value at the optimum
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
};

/// Starting values: kappa = 1, per-task tau from the 1/(4 pi kappa^2 var)
/// relation applied to pooled OLS coefficient variance, sigma2 from pooled
/// OLS residual variance.
Hyperparameters initial_hyperparameters(const std::vector<SessionData>& sessions);

/// MAP estimation of the shared hyperparameters over all sessions in the
/// context (pooled across visits), via quasi-Newton on log parameters.
BayesFit fit_bayes_longitudinal(const BayesContext& ctx, const Hyperparameters& init,
                                const BayesFitOptions& opts = {});

}  // namespace surfglm
