#include "surfglm/bayes.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "surfglm/classical.hpp"
#include "surfglm/errors.hpp"
#include "surfglm/optim.hpp"

namespace surfglm {

Eigen::VectorXd Hyperparameters::pack_log() const {
  const int K = n_tasks();
  if (tau.size() != K) throw ConfigError("Hyperparameters: kappa/tau size mismatch");
  Eigen::VectorXd psi(2 * K + 1);
  for (int k = 0; k < K; ++k) {
    if (kappa[k] <= 0 || tau[k] <= 0)
      throw ConfigError("Hyperparameters: kappa and tau must be positive");
    psi[2 * k] = std::log(kappa[k]);
    psi[2 * k + 1] = std::log(tau[k]);
  }
  if (sigma2 <= 0) throw ConfigError("Hyperparameters: sigma2 must be positive");
  psi[2 * K] = std::log(sigma2);
  return psi;
}

Hyperparameters Hyperparameters::unpack_log(const Eigen::VectorXd& psi, int K) {
  if (psi.size() != 2 * K + 1)
    throw ConfigError("Hyperparameters: packed vector has wrong length");
  Hyperparameters th;
  th.kappa.resize(K);
  th.tau.resize(K);
  for (int k = 0; k < K; ++k) {
    th.kappa[k] = std::exp(psi[2 * k]);
    th.tau[k] = std::exp(psi[2 * k + 1]);
  }
  th.sigma2 = std::exp(psi[2 * K]);
  return th;
}

double HyperPriors::log_density_psi(const Eigen::VectorXd& psi, int K) const {
  if (flat) return 0.0;
  double lp = 0.0;
  auto normal_lp = [](double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd);
  };
  for (int k = 0; k < K; ++k) {
    lp += normal_lp(psi[2 * k], log_kappa_mean, log_kappa_sd);
    lp += normal_lp(psi[2 * k + 1], log_tau_mean, log_tau_sd);
  }
  // Gamma(shape, rate) on the precision phi = exp(-psi_sigma), including the
  // Jacobian of the map psi -> phi; additive constants dropped.
  const double psi_s = psi[2 * K];
  lp += -precision_shape * psi_s - precision_rate * std::exp(-psi_s);
  return lp;
}

SessionStats session_stats(const SessionData& session) {
  SessionStats st;
  st.S = session.X_task.transpose() * session.X_task;
  st.U = session.Y.transpose() * session.X_task;
  st.yy = session.Y.squaredNorm();
  st.T = session.n_kept();
  return st;
}

Eigen::MatrixXd SessionPosterior::sample(rng::Engine& eng) const {
  const Eigen::Index V = mu.rows();
  const Eigen::Index K = mu.cols();
  Eigen::VectorXd z(V * K);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = eng.normal();
  Eigen::VectorXd draw = chol->unwhiten(z);
  Eigen::MatrixXd out = mu;
  for (Eigen::Index k = 0; k < K; ++k) out.col(k) += draw.segment(k * V, V);
  return out;
}

BayesContext::BayesContext(const FemMatrices& fem, std::vector<SessionStats> stats)
    : stats_(std::move(stats)), builder_(fem) {
  V_ = static_cast<int>(fem.mass.size());
  if (stats_.empty()) throw DataError("BayesContext: no sessions");
  K_ = static_cast<int>(stats_.front().S.rows());
  for (const auto& st : stats_) {
    if (st.S.rows() != K_ || st.S.cols() != K_)
      throw DataError("BayesContext: inconsistent task count across sessions");
    if (st.U.rows() != V_ || st.U.cols() != K_)
      throw DataError("BayesContext: session stats do not match mesh size");
    if (st.T <= 0) throw DataError("BayesContext: session with no volumes");
  }
}

void BayesContext::prior_factors(const Hyperparameters& theta,
                                 std::vector<SparseMat>& Q_out,
                                 double& logdet_out) const {
  Q_out.clear();
  Q_out.reserve(K_);
  logdet_out = 0.0;
  for (int k = 0; k < K_; ++k) {
    Q_out.push_back(builder_.build(theta.kappa[k], theta.tau[k]).Q);
    if (!prior_analyzed_) {
      chol_prior_.analyze(Q_out.back());
      prior_analyzed_ = true;
    }
    chol_prior_.factorize(Q_out.back());
    logdet_out += chol_prior_.log_det();
  }
}

SparseMat BayesContext::assemble_posterior_precision(
    const std::vector<SparseMat>& Q_prior, const SessionStats& st,
    double sigma2) const {
  const int V = V_;
  const int K = K_;
  std::vector<Eigen::Triplet<double>> trips;
  size_t nnz_prior = 0;
  for (const auto& Q : Q_prior) nnz_prior += static_cast<size_t>(Q.nonZeros());
  trips.reserve(nnz_prior + static_cast<size_t>(K) * K * V);

  for (int k = 0; k < K; ++k) {
    const SparseMat& Q = Q_prior[static_cast<size_t>(k)];
    const int off = k * V;
    for (int outer = 0; outer < Q.outerSize(); ++outer)
      for (SparseMat::InnerIterator it(Q, outer); it; ++it)
        trips.emplace_back(off + static_cast<int>(it.row()),
                           off + static_cast<int>(it.col()), it.value());
  }
  const double inv_s2 = 1.0 / sigma2;
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      const double w = st.S(k, l) * inv_s2;
      for (int v = 0; v < V; ++v)
        trips.emplace_back(k * V + v, l * V + v, w);
    }

  SparseMat Qpost(K * V, K * V);
  Qpost.setFromTriplets(trips.begin(), trips.end());
  return Qpost;
}

double BayesContext::log_marginal(const Hyperparameters& theta) const {
  if (theta.n_tasks() != K_)
    throw ConfigError("log_marginal: hyperparameter task count mismatch");
  std::vector<SparseMat> Q_prior;
  double logdet_prior = 0.0;
  prior_factors(theta, Q_prior, logdet_prior);

  const double log_2pi_s2 = std::log(2.0 * M_PI * theta.sigma2);
  const double inv_s2 = 1.0 / theta.sigma2;
  double total = 0.0;
  for (const auto& st : stats_) {
    SparseMat Qpost = assemble_posterior_precision(Q_prior, st, theta.sigma2);
    if (!post_analyzed_) {
      chol_post_.analyze(Qpost);
      post_analyzed_ = true;
    }
    chol_post_.factorize(Qpost);

    Eigen::VectorXd b(static_cast<Eigen::Index>(K_) * V_);
    for (int k = 0; k < K_; ++k) b.segment(k * V_, V_) = st.U.col(k) * inv_s2;

    total += 0.5 * logdet_prior - 0.5 * chol_post_.log_det() -
             0.5 * double(st.T) * V_ * log_2pi_s2 - 0.5 * st.yy * inv_s2 +
             0.5 * chol_post_.inv_quad(b);
  }
  return total;
}

double BayesContext::map_objective(const Eigen::VectorXd& psi,
                                   const HyperPriors& priors) const {
  if (psi.lpNorm<Eigen::Infinity>() > 30.0)
    return std::numeric_limits<double>::infinity();
  try {
    Hyperparameters th = Hyperparameters::unpack_log(psi, K_);
    return -(log_marginal(th) + priors.log_density_psi(psi, K_));
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

SessionPosterior BayesContext::posterior(const Hyperparameters& theta,
                                         int session) const {
  if (session < 0 || session >= n_sessions())
    throw ConfigError("posterior: session index out of range");
  std::vector<SparseMat> Q_prior;
  double logdet_prior = 0.0;
  prior_factors(theta, Q_prior, logdet_prior);

  const SessionStats& st = stats_[static_cast<size_t>(session)];
  SparseMat Qpost = assemble_posterior_precision(Q_prior, st, theta.sigma2);

  SessionPosterior post;
  post.sigma2 = theta.sigma2;
  post.chol = std::make_shared<SparseChol>();
  post.chol->factorize(Qpost);

  const double inv_s2 = 1.0 / theta.sigma2;
  Eigen::VectorXd b(static_cast<Eigen::Index>(K_) * V_);
  for (int k = 0; k < K_; ++k) b.segment(k * V_, V_) = st.U.col(k) * inv_s2;
  Eigen::VectorXd mu_vec = post.chol->solve(b);

  post.mu.resize(V_, K_);
  for (int k = 0; k < K_; ++k) post.mu.col(k) = mu_vec.segment(k * V_, V_);
  return post;
}

Hyperparameters initial_hyperparameters(const std::vector<SessionData>& sessions) {
  if (sessions.empty()) throw DataError("initial_hyperparameters: no sessions");
  const int K = sessions.front().n_tasks();

  std::vector<std::vector<double>> betas(static_cast<size_t>(K));
  double sigma2_sum = 0.0;
  for (const auto& s : sessions) {
    if (s.n_tasks() != K)
      throw DataError("initial_hyperparameters: inconsistent task counts");
    ClassicalFit fit = fit_classical(s);
    for (int k = 0; k < K; ++k)
      for (Eigen::Index v = 0; v < fit.beta.cols(); ++v)
        betas[static_cast<size_t>(k)].push_back(fit.beta(k, v));
    sigma2_sum += fit.sigma2.mean();
  }

  Hyperparameters th;
  th.kappa = Eigen::VectorXd::Ones(K);
  th.tau.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto& bk = betas[static_cast<size_t>(k)];
    double mean = 0.0;
    for (double x : bk) mean += x;
    mean /= double(bk.size());
    double var = 0.0;
    for (double x : bk) var += (x - mean) * (x - mean);
    var /= std::max<size_t>(1, bk.size() - 1);
    // Matern marginal variance 1/(4 pi kappa^2 tau) with kappa = 1.
    double tau = 1.0 / (4.0 * M_PI * std::max(var, 1e-12));
    th.tau[k] = std::min(std::max(tau, 1e-8), 1e8);
  }
  th.sigma2 = std::max(sigma2_sum / double(sessions.size()), 1e-10);
  return th;
}

BayesFit fit_bayes_longitudinal(const BayesContext& ctx, const Hyperparameters& init,
                                const BayesFitOptions& opts) {
  Eigen::VectorXd psi0 = init.pack_log();
  BfgsOptions bopts;
  bopts.rel_tol = opts.rel_tol;
  bopts.max_iters = opts.max_iters;
  bopts.fd_step = opts.fd_step;

  auto objective = [&](const Eigen::VectorXd& psi) {
    return ctx.map_objective(psi, opts.priors);
  };
  BfgsResult r = minimize_bfgs(objective, psi0, bopts);

  BayesFit fit;
  fit.theta = Hyperparameters::unpack_log(r.x, ctx.n_tasks());
  fit.objective = r.f;
  fit.iterations = r.iterations;
  fit.n_evals = r.n_evals;
  fit.converged = r.converged;
  fit.log_marginal = ctx.log_marginal(fit.theta);
  return fit;
}

}  // namespace surfglm
