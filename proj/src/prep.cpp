#include "surfglm/prep.hpp"

#include <Eigen/QR>
#include <cmath>
#include <sstream>

#include "surfglm/errors.hpp"

namespace surfglm {

Eigen::MatrixXd to_percent_signal_change(const Eigen::MatrixXd& Y_raw) {
  const Eigen::Index T = Y_raw.rows();
  const Eigen::Index V = Y_raw.cols();
  if (T < 2) throw DataError("percent signal change needs at least 2 volumes");
  Eigen::VectorXd means = Y_raw.colwise().mean();

  std::vector<Eigen::Index> bad;
  for (Eigen::Index v = 0; v < V; ++v) {
    if (!(means[v] > 0.0) || std::abs(means[v]) < 1e-8) bad.push_back(v);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "non-positive or near-zero temporal mean at " << bad.size()
        << " vertex(es):";
    for (size_t i = 0; i < bad.size() && i < 20; ++i) msg << ' ' << bad[i];
    if (bad.size() > 20) msg << " ...";
    throw DataError(msg.str());
  }

  Eigen::MatrixXd out(T, V);
  for (Eigen::Index v = 0; v < V; ++v)
    out.col(v) = 100.0 * (Y_raw.col(v).array() - means[v]) / means[v];
  return out;
}

NuisanceResult nuisance_regress(const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& X_task,
                                const Eigen::MatrixXd& N) {
  const Eigen::Index T = Y.rows();
  if (X_task.rows() != T)
    throw DataError("nuisance_regress: task design rows != data rows");
  if (N.size() > 0 && N.rows() != T)
    throw DataError("nuisance_regress: nuisance rows != data rows");

  const Eigen::Index p = N.size() > 0 ? N.cols() : 0;
  Eigen::MatrixXd Z(T, 1 + p);
  Z.col(0).setOnes();
  if (p > 0) Z.rightCols(p) = N;

  if (T <= Z.cols())
    throw DataError("nuisance_regress: more projected columns than volumes");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank < Z.cols()) {
    // Identify which columns are linearly dependent on the preceding ones.
    std::ostringstream msg;
    msg << "nuisance design is rank deficient (rank " << rank << " of "
        << Z.cols() << "); dependent column(s):";
    Eigen::Index r_prev = 1;  // intercept is never zero
    for (Eigen::Index j = 1; j < Z.cols(); ++j) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> step(Z.leftCols(j + 1));
      step.setThreshold(1e-10);
      if (step.rank() == r_prev)
        msg << " nuisance[" << (j - 1) << "]";
      else
        r_prev = step.rank();
    }
    throw DataError(msg.str());
  }

  // Residual-maker applied via least squares: R(M) = M - Z (Z^+ M).
  NuisanceResult res;
  res.Y_resid = Y - Z * qr.solve(Y);
  res.X_resid = X_task - Z * qr.solve(X_task);
  res.residual_df = static_cast<int>(T - Z.cols());
  return res;
}

Eigen::MatrixXd filter_rows(const Eigen::MatrixXd& M, const std::vector<bool>& keep) {
  if (static_cast<Eigen::Index>(keep.size()) != M.rows())
    throw DataError("filter_rows: keep flags length != rows");
  Eigen::Index n_keep = 0;
  for (bool k : keep) n_keep += k ? 1 : 0;
  Eigen::MatrixXd out(n_keep, M.cols());
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < M.rows(); ++t)
    if (keep[static_cast<size_t>(t)]) out.row(r++) = M.row(t);
  return out;
}

SessionData prepare_session(const Eigen::MatrixXd& Y_raw,
                            const Eigen::MatrixXd& X_task_full,
                            const Eigen::MatrixXd& N_full,
                            const std::vector<bool>& keep,
                            std::string subject_id, std::string visit_id) {
  if (Y_raw.rows() != X_task_full.rows())
    throw DataError("prepare_session: BOLD rows != design rows");
  if (static_cast<Eigen::Index>(keep.size()) != Y_raw.rows())
    throw DataError("prepare_session: keep flags length != volumes");

  SessionData s;
  s.subject_id = std::move(subject_id);
  s.visit_id = std::move(visit_id);
  s.keep_flags = keep;

  Eigen::MatrixXd Y_kept = filter_rows(Y_raw, keep);
  Eigen::MatrixXd X_kept = filter_rows(X_task_full, keep);
  Eigen::MatrixXd N_kept =
      N_full.size() > 0 ? filter_rows(N_full, keep) : Eigen::MatrixXd(Y_kept.rows(), 0);

  // Re-normalize the task columns on the kept rows so the peak-1 convention
  // still holds after volumes are dropped.
  for (Eigen::Index k = 0; k < X_kept.cols(); ++k) {
    double m = X_kept.col(k).cwiseAbs().maxCoeff();
    if (m > 0.0) X_kept.col(k) /= m;
  }
  if (X_kept.cols() >= 2) {
    double n0 = X_kept.col(0).norm(), n1 = X_kept.col(1).norm();
    if (n0 > 0 && n1 > 0)
      s.dhrf_correlation = X_kept.col(0).dot(X_kept.col(1)) / (n0 * n1);
  }

  Eigen::MatrixXd Y_psc = to_percent_signal_change(Y_kept);
  NuisanceResult nr = nuisance_regress(Y_psc, X_kept, N_kept);

  s.Y = std::move(nr.Y_resid);
  s.X_task = std::move(nr.X_resid);
  s.N_nuisance = std::move(N_kept);
  s.n_projected = static_cast<int>(1 + (N_full.size() > 0 ? N_full.cols() : 0));
  s.residualized = true;
  if (s.residual_df() <= 0)
    throw DataError("prepare_session: no residual degrees of freedom left");
  return s;
}

}  // namespace surfglm
