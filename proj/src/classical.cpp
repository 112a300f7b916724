#include "surfglm/classical.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "surfglm/errors.hpp"

namespace surfglm {

ClassicalFit fit_classical(const SessionData& session) {
  const Eigen::MatrixXd& X = session.X_task;
  const Eigen::MatrixXd& Y = session.Y;
  const Eigen::Index T = Y.rows();
  const Eigen::Index V = Y.cols();
  const Eigen::Index K = X.cols();
  if (X.rows() != T) throw DataError("fit_classical: design/data row mismatch");

  const int df = session.residual_df();
  if (df <= 0) throw DataError("fit_classical: nonpositive degrees of freedom");

  Eigen::MatrixXd XtX = X.transpose() * X;
  Eigen::LLT<Eigen::MatrixXd> llt(XtX);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fit_classical: singular task design (X'X not PD)");
  Eigen::MatrixXd XtX_inv = llt.solve(Eigen::MatrixXd::Identity(K, K));

  ClassicalFit fit;
  fit.df = df;
  fit.beta = llt.solve(X.transpose() * Y);           // K x V
  Eigen::MatrixXd resid = Y - X * fit.beta;          // T x V
  fit.sigma2 = resid.colwise().squaredNorm().transpose() / double(df);

  fit.se.resize(K, V);
  fit.t.resize(K, V);
  fit.p.resize(K, V);
  boost::math::students_t dist(df);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double ckk = XtX_inv(k, k);
    for (Eigen::Index v = 0; v < V; ++v) {
      double se = std::sqrt(ckk * fit.sigma2[v]);
      fit.se(k, v) = se;
      if (se > 0.0) {
        double t = fit.beta(k, v) / se;
        fit.t(k, v) = t;
        fit.p(k, v) = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      } else {
        fit.t(k, v) = 0.0;
        fit.p(k, v) = 1.0;
      }
    }
  }
  return fit;
}

std::vector<bool> bonferroni_reject(const Eigen::VectorXd& p, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ConfigError("bonferroni_reject: alpha must be in (0, 1)");
  const Eigen::Index m = p.size();
  std::vector<bool> rej(static_cast<size_t>(m), false);
  if (m == 0) return rej;
  const double cut = alpha / double(m);
  for (Eigen::Index i = 0; i < m; ++i) rej[static_cast<size_t>(i)] = p[i] <= cut;
  return rej;
}

std::vector<bool> bh_reject(const Eigen::VectorXd& p, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ConfigError("bh_reject: alpha must be in (0, 1)");
  const Eigen::Index m = p.size();
  std::vector<bool> rej(static_cast<size_t>(m), false);
  if (m == 0) return rej;

  std::vector<Eigen::Index> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return p[a] < p[b]; });

  Eigen::Index k_star = 0;  // 1-based count of rejections
  for (Eigen::Index k = m; k >= 1; --k) {
    if (p[order[static_cast<size_t>(k - 1)]] <= double(k) * alpha / double(m)) {
      k_star = k;
      break;
    }
  }
  for (Eigen::Index i = 0; i < k_star; ++i)
    rej[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;
  return rej;
}

}  // namespace surfglm
