#include "surfglm/scrub.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "surfglm/errors.hpp"

namespace surfglm {

namespace {
double median_of(Eigen::VectorXd v) {
  const Eigen::Index n = v.size();
  std::sort(v.data(), v.data() + n);
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

ScrubResult scrub_session(const Eigen::MatrixXd& Y, const ScrubOptions& opts) {
  const Eigen::Index T = Y.rows();
  const Eigen::Index V = Y.cols();
  if (T < 3) throw DataError("scrub_session: need at least 3 volumes");
  if (V < 1) throw DataError("scrub_session: empty data matrix");
  if (opts.leverage_multiplier <= 0.0)
    throw ConfigError("scrub_session: leverage multiplier must be positive");

  Eigen::MatrixXd C = Y.rowwise() - Y.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();

  // Component variances are sigma_i^2 / (T - 1); the mean test needs only
  // the sigma^2 scale.
  Eigen::VectorXd var = sv.array().square();
  double mean_var = var.mean();
  Eigen::Index q = 0;
  while (q < var.size() && var[q] > mean_var) ++q;
  if (q == 0) q = 1;  // always keep the leading direction

  ScrubResult res;
  res.n_components = static_cast<int>(q);
  res.leverage = svd.matrixU().leftCols(q).rowwise().squaredNorm();
  res.median_leverage = median_of(res.leverage);
  res.threshold = opts.leverage_multiplier * res.median_leverage;

  res.keep.assign(static_cast<size_t>(T), true);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (res.leverage[t] > res.threshold) {
      res.keep[static_cast<size_t>(t)] = false;
      ++res.n_flagged;
    }
  }
  res.session_usable = res.flagged_fraction() <= opts.max_flagged_fraction;
  return res;
}

}  // namespace surfglm
