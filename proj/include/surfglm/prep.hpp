#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "surfglm/hrf.hpp"

namespace surfglm {

/// One visit's data ready for model fitting: percent-signal-change BOLD,
/// task regressors, and nuisance regressors, all restricted to kept
/// (unscrubbed) volumes. After prepare(), Y and X_task hold residuals from
/// the nuisance projection and n_projected counts the projected-out columns
/// (intercept + nuisance), so downstream degrees of freedom are
/// T_kept - n_projected - K.
struct SessionData {
  Eigen::MatrixXd Y;           // T_kept x V
  Eigen::MatrixXd X_task;      // T_kept x K (K = 2: HRF, dHRF)
  Eigen::MatrixXd N_nuisance;  // T_kept x p (pre-residualization copy)
  std::vector<bool> keep_flags;  // original volumes, true = kept
  std::string subject_id;
  std::string visit_id;
  int n_projected = 0;         // columns projected out of Y and X_task
  bool residualized = false;
  double dhrf_correlation = 0.0;  // corr(HRF, dHRF) before residualization

  int n_kept() const { return static_cast<int>(Y.rows()); }
  int n_vertices() const { return static_cast<int>(Y.cols()); }
  int n_tasks() const { return static_cast<int>(X_task.cols()); }
  int residual_df() const { return n_kept() - n_projected - n_tasks(); }
};

/// 100 * (y - mean) / mean per column; output columns have exactly zero
/// mean. Throws DataError listing the offending vertices if any temporal
/// mean is non-positive or smaller than 1e-8 in magnitude.
Eigen::MatrixXd to_percent_signal_change(const Eigen::MatrixXd& Y_raw);

struct NuisanceResult {
  Eigen::MatrixXd Y_resid;
  Eigen::MatrixXd X_resid;
  int residual_df = 0;  // T - 1 - p
};

/// Projects an intercept plus the nuisance columns out of both Y and
/// X_task. Throws DataError naming dependent columns when [1 | N] is rank
/// deficient. N may have zero columns (intercept-only projection).
NuisanceResult nuisance_regress(const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& X_task,
                                const Eigen::MatrixXd& N);

/// Drops the rows of M flagged false.
Eigen::MatrixXd filter_rows(const Eigen::MatrixXd& M, const std::vector<bool>& keep);

/// Full preparation of one session: scrub-filter rows, rescale task columns
/// to peak 1 on the kept rows, convert BOLD to percent signal change, and
/// residualize nuisance from data and design.
SessionData prepare_session(const Eigen::MatrixXd& Y_raw,
                            const Eigen::MatrixXd& X_task_full,
                            const Eigen::MatrixXd& N_full,
                            const std::vector<bool>& keep,
                            std::string subject_id, std::string visit_id);

}  // namespace surfglm
