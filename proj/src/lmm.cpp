#include "surfglm/lmm.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "surfglm/errors.hpp"
#include "surfglm/optim.hpp"

namespace surfglm {

namespace {

struct Groups {
  std::vector<std::vector<int>> rows;  // row indices per subject
  int n_subjects() const { return static_cast<int>(rows.size()); }
};

Groups index_groups(const std::vector<int>& group, Eigen::Index n) {
  if (static_cast<Eigen::Index>(group.size()) != n)
    throw DataError("lmm: group labels length != observations");
  std::map<int, std::vector<int>> by_id;
  for (Eigen::Index i = 0; i < n; ++i)
    by_id[group[static_cast<size_t>(i)]].push_back(static_cast<int>(i));
  Groups g;
  g.rows.reserve(by_id.size());
  for (auto& [id, rows] : by_id) g.rows.push_back(std::move(rows));
  return g;
}

struct ProfileEval {
  Eigen::VectorXd beta;
  Eigen::MatrixXd gls_info_inv;  // (X' W X)^{-1}, unscaled by sigma^2
  double rss = 0.0;              // weighted residual sum of squares
  double logdet_v = 0.0;         // sum_i log(1 + lambda n_i)
  double logdet_xwx = 0.0;
  double loglik = 0.0;
  double sigma2 = 0.0;
};

/// Profile likelihood pieces at one lambda. W_i = I - (lambda/(1+lambda n_i)) J
/// is the inverse of I + lambda J, so all per-subject algebra is closed-form.
ProfileEval profile_at(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Groups& g, double lambda, bool reml) {
  const Eigen::Index N = y.size();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd XtWX = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd XtWy = Eigen::VectorXd::Zero(p);
  double logdet_v = 0.0;

  for (const auto& rows : g.rows) {
    const int ni = static_cast<int>(rows.size());
    const double c = lambda / (1.0 + lambda * ni);
    logdet_v += std::log1p(lambda * ni);
    Eigen::MatrixXd Xi(ni, p);
    Eigen::VectorXd yi(ni);
    for (int r = 0; r < ni; ++r) {
      Xi.row(r) = X.row(rows[static_cast<size_t>(r)]);
      yi[r] = y[rows[static_cast<size_t>(r)]];
    }
    Eigen::RowVectorXd xsum = Xi.colwise().sum();
    const double ysum = yi.sum();
    XtWX += Xi.transpose() * Xi - c * xsum.transpose() * xsum;
    XtWy += Xi.transpose() * yi - c * xsum.transpose() * ysum;
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(XtWX);
  const Eigen::VectorXd D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-12 * D.maxCoeff())
    throw NumericalError("lmm: singular fixed-effects design");

  ProfileEval ev;
  ev.beta = ldlt.solve(XtWy);
  ev.gls_info_inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  ev.logdet_v = logdet_v;
  ev.logdet_xwx = D.array().log().sum();

  // Weighted RSS computed groupwise with the same rank-one correction.
  double rss = 0.0;
  for (const auto& rows : g.rows) {
    const int ni = static_cast<int>(rows.size());
    const double c = lambda / (1.0 + lambda * ni);
    double ss = 0.0, rsum = 0.0;
    for (int r = 0; r < ni; ++r) {
      const int idx = rows[static_cast<size_t>(r)];
      const double resid = y[idx] - X.row(idx).dot(ev.beta);
      ss += resid * resid;
      rsum += resid;
    }
    rss += ss - c * rsum * rsum;
  }
  ev.rss = rss;

  const double log2pi = std::log(2.0 * M_PI);
  if (!reml) {
    ev.sigma2 = rss / double(N);
    ev.loglik = -0.5 * (double(N) * (log2pi + std::log(ev.sigma2)) + logdet_v +
                        double(N));
  } else {
    const double nmp = double(N - p);
    if (nmp <= 0) throw DataError("lmm: fewer observations than fixed effects");
    ev.sigma2 = rss / nmp;
    ev.loglik = -0.5 * (nmp * (log2pi + std::log(ev.sigma2)) + logdet_v +
                        ev.logdet_xwx + nmp);
  }
  return ev;
}

LmmSolution to_solution(const ProfileEval& ev, double lambda) {
  LmmSolution sol;
  sol.fixed_effects = ev.beta;
  sol.fixed_cov = ev.sigma2 * ev.gls_info_inv;
  sol.lambda = lambda;
  sol.residual_var = ev.sigma2;
  sol.random_intercept_var = lambda * ev.sigma2;
  sol.loglik = ev.loglik;
  return sol;
}

LmmSolution optimize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Groups& g, bool reml) {
  auto neg_ll = [&](double log_lambda) {
    return -profile_at(X, y, g, std::exp(log_lambda), reml).loglik;
  };

  // Coarse grid over log lambda, then Brent inside the best bracket; the
  // exact boundary lambda = 0 always competes.
  const double lo = -12.0, hi = 12.0;
  const int n_grid = 49;
  double best_x = lo, best_f = neg_ll(lo);
  for (int i = 1; i < n_grid; ++i) {
    const double xi = lo + (hi - lo) * double(i) / double(n_grid - 1);
    const double fi = neg_ll(xi);
    if (fi < best_f) {
      best_f = fi;
      best_x = xi;
    }
  }
  const double step = (hi - lo) / double(n_grid - 1);
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  const double x_opt = minimize_brent(neg_ll, a, b, 1e-10);
  double lambda = std::exp(x_opt);
  double f_opt = neg_ll(x_opt);
  if (best_f < f_opt) {
    lambda = std::exp(best_x);
    f_opt = best_f;
  }

  ProfileEval at_zero = profile_at(X, y, g, 0.0, reml);
  if (-at_zero.loglik <= f_opt) return to_solution(at_zero, 0.0);
  return to_solution(profile_at(X, y, g, lambda, reml), lambda);
}

}  // namespace

LmmSolution solve_at_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<int>& group, double lambda,
                            bool reml) {
  if (lambda < 0.0) throw ConfigError("solve_at_lambda: lambda must be >= 0");
  Groups g = index_groups(group, y.size());
  return to_solution(profile_at(X, y, g, lambda, reml), lambda);
}

LmmFit fit_random_intercept(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<int>& group,
                            std::vector<std::string> term_names) {
  if (X.rows() != y.size()) throw DataError("lmm: design rows != observations");
  Groups g = index_groups(group, y.size());
  if (g.n_subjects() < 2) throw DataError("lmm: need at least 2 subjects");
  if (y.size() <= X.cols())
    throw DataError("lmm: fewer observations than fixed effects");
  if (!term_names.empty() &&
      static_cast<Eigen::Index>(term_names.size()) != X.cols())
    throw ConfigError("lmm: term names length != design columns");

  LmmFit fit;
  fit.ml = optimize(X, y, g, false);
  fit.reml = optimize(X, y, g, true);
  fit.n_obs = static_cast<int>(y.size());
  fit.n_subjects = g.n_subjects();
  fit.term_names = std::move(term_names);
  return fit;
}

Eigen::VectorXd random_intercept_blups(const LmmSolution& sol,
                                       const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y,
                                       const std::vector<int>& group) {
  Groups g = index_groups(group, y.size());
  Eigen::VectorXd b(g.n_subjects());
  for (int i = 0; i < g.n_subjects(); ++i) {
    const auto& rows = g.rows[static_cast<size_t>(i)];
    const int ni = static_cast<int>(rows.size());
    double rsum = 0.0;
    for (int idx : rows) rsum += y[idx] - X.row(idx).dot(sol.fixed_effects);
    // E[b_i | y] = (lambda n_i / (1 + lambda n_i)) * mean residual.
    b[i] = (sol.lambda * ni / (1.0 + sol.lambda * ni)) * (rsum / ni);
  }
  return b;
}

LrtResult lrt(const LmmFit& null_fit, const LmmFit& alt_fit) {
  if (null_fit.n_obs != alt_fit.n_obs)
    throw DataError("lrt: fits use different data sizes");
  const int df = alt_fit.n_fixed() - null_fit.n_fixed();
  if (df < 0) throw ConfigError("lrt: alternative has fewer fixed effects than null");

  double stat = 2.0 * (alt_fit.ml.loglik - null_fit.ml.loglik);
  if (stat < 0.0) {
    if (stat < -1e-6)
      throw NumericalError("lrt: alternative likelihood below null (fits not nested?)");
    stat = 0.0;
  }

  LrtResult r;
  r.statistic = stat;
  r.df = df;
  if (df == 0 || stat == 0.0) {
    r.p_value = 1.0;
  } else {
    boost::math::chi_squared chisq(df);
    r.p_value = boost::math::cdf(boost::math::complement(chisq, stat));
  }
  return r;
}

double aic(const LmmFit& fit) {
  const int p = fit.n_fixed() + 2;
  return -2.0 * fit.ml.loglik + 2.0 * double(p);
}

}  // namespace surfglm
