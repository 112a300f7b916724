#pragma once

#include <Eigen/Dense>
#include <vector>

namespace surfglm {

/// Double-gamma hemodynamic response parameters. The positive lobe peaks at
/// `peak_time` and the undershoot at `undershoot_time`; dispersions are the
/// gamma scale parameters. The kernel is normalized so its peak value is 1.
struct HrfParams {
  double peak_time = 6.0;          // s
  double undershoot_time = 16.0;   // s
  double peak_dispersion = 1.0;    // s
  double undershoot_dispersion = 1.0;  // s
  double undershoot_ratio = 1.0 / 6.0;
};

/// h(t) = g(t; peak) - c * g(t; undershoot), peak-normalized to 1.
/// g is a gamma-density kernel with mode at the requested peak time.
/// Throws ConfigError on non-positive shape/scale parameters.
double hrf(double t, const HrfParams& params = {});

/// Task timing for one run. Volume i (zero-based, post-drop) is acquired at
/// time (n_dropped_initial + i) * TR; onsets are on the same clock.
struct StimulusSchedule {
  std::vector<double> onsets;     // s, nonnegative and increasing
  std::vector<double> durations;  // s, one per onset
  double TR = 2.0;                // s
  int n_volumes = 0;              // recorded volumes (post-drop)
  int n_dropped_initial = 0;

  double scan_end() const { return (n_dropped_initial + n_volumes) * TR; }
  void validate() const;
};

/// Column 1: stimulus boxcar convolved with the HRF, sampled at volume
/// acquisition times. Column 2: temporal derivative of column 1 (central
/// finite difference over one TR, one-sided at the ends). Both columns are
/// rescaled to max |value| = 1; all-zero columns are left untouched.
Eigen::MatrixXd build_task_regressors(const StimulusSchedule& sched,
                                      const HrfParams& params = {});

/// Pearson correlation between the two task columns. The derivative column
/// is never orthogonalized; this is reported in session metadata instead.
double task_column_correlation(const Eigen::MatrixXd& X);

}  // namespace surfglm
