#pragma once

#include <Eigen/Dense>
#include <vector>

namespace surfglm {

struct ScrubOptions {
  double leverage_multiplier = 4.0;   // flag leverage > multiplier * median
  double max_flagged_fraction = 0.25; // beyond this the session is dropped
};

struct ScrubResult {
  std::vector<bool> keep;       // per volume, true = retained
  Eigen::VectorXd leverage;     // per volume
  double median_leverage = 0.0;
  double threshold = 0.0;       // multiplier * median
  int n_flagged = 0;
  int n_components = 0;         // PCA components with above-average variance
  bool session_usable = true;   // false when flagged fraction > limit
  double flagged_fraction() const {
    return leverage.size() ? double(n_flagged) / double(leverage.size()) : 0.0;
  }
};

/// PCA-leverage spike detection. Columns of Y (vertices) are centered over
/// time, the left singular vectors with above-average variance are kept,
/// and volume t's leverage is the squared row norm of the retained U rows.
/// Volumes with leverage strictly greater than multiplier x median are
/// flagged for removal.
ScrubResult scrub_session(const Eigen::MatrixXd& Y, const ScrubOptions& opts = {});

}  // namespace surfglm
