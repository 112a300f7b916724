#include "surfglm/hrf.hpp"

#include <algorithm>
#include <cmath>

#include "surfglm/errors.hpp"

namespace surfglm {

namespace {

// Gamma-density kernel parameterized by its mode m and scale b:
// shape a = m/b + 1, so g peaks at t = m.
double gamma_kernel(double t, double mode, double scale) {
  if (t <= 0.0) return 0.0;
  const double a = mode / scale + 1.0;
  return std::exp((a - 1.0) * std::log(t) - t / scale - std::lgamma(a) -
                  a * std::log(scale));
}

void check_params(const HrfParams& p) {
  if (!(p.peak_time > 0.0) || !(p.undershoot_time > 0.0) ||
      !(p.peak_dispersion > 0.0) || !(p.undershoot_dispersion > 0.0))
    throw ConfigError("HRF shape/scale parameters must be positive");
}

double hrf_raw(double t, const HrfParams& p) {
  return gamma_kernel(t, p.peak_time, p.peak_dispersion) -
         p.undershoot_ratio * gamma_kernel(t, p.undershoot_time, p.undershoot_dispersion);
}

// Peak of the unnormalized kernel, located on a fine grid. The kernel is
// unimodal near peak_time so a grid search is plenty.
double hrf_peak_value(const HrfParams& p) {
  const double t_max = std::max(60.0, 3.0 * p.undershoot_time);
  double peak = 0.0;
  for (double t = 0.0; t <= t_max; t += 0.005)
    peak = std::max(peak, std::abs(hrf_raw(t, p)));
  if (!(peak > 0.0)) throw ConfigError("HRF kernel is identically zero");
  return peak;
}

}  // namespace

double hrf(double t, const HrfParams& params) {
  check_params(params);
  return hrf_raw(t, params) / hrf_peak_value(params);
}

void StimulusSchedule::validate() const {
  if (n_volumes <= 0) throw DataError("schedule: n_volumes must be positive");
  if (TR <= 0.0) throw DataError("schedule: TR must be positive");
  if (n_dropped_initial < 0) throw DataError("schedule: n_dropped_initial must be >= 0");
  if (onsets.size() != durations.size())
    throw DataError("schedule: onsets and durations differ in length");
  double prev = -1.0;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    if (onsets[i] < 0.0) throw DataError("schedule: onset " + std::to_string(i) + " is negative");
    if (onsets[i] <= prev)
      throw DataError("schedule: onsets must be strictly increasing (record " +
                      std::to_string(i) + ")");
    if (durations[i] < 0.0)
      throw DataError("schedule: duration " + std::to_string(i) + " is negative");
    if (onsets[i] + durations[i] > scan_end() + 1e-9)
      throw DataError("schedule: block " + std::to_string(i) + " ends at " +
                      std::to_string(onsets[i] + durations[i]) +
                      " s, beyond scan end " + std::to_string(scan_end()) + " s");
    prev = onsets[i];
  }
}

Eigen::MatrixXd build_task_regressors(const StimulusSchedule& sched,
                                      const HrfParams& params) {
  sched.validate();
  check_params(params);
  const int T = sched.n_volumes;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, 2);
  if (sched.onsets.empty()) return X;  // no stimulus: both columns stay zero

  // Supersample the boxcar at dt = TR/16 and convolve with the HRF on the
  // same grid; volume acquisition times land exactly on grid points.
  const int oversample = 16;
  const double dt = sched.TR / oversample;
  const int n_grid = (sched.n_dropped_initial + sched.n_volumes) * oversample;

  std::vector<double> box(static_cast<std::size_t>(n_grid), 0.0);
  for (std::size_t b = 0; b < sched.onsets.size(); ++b) {
    const int lo = static_cast<int>(std::ceil(sched.onsets[b] / dt - 1e-9));
    const int hi = static_cast<int>(std::floor((sched.onsets[b] + sched.durations[b]) / dt - 1e-9));
    for (int g = std::max(lo, 0); g <= std::min(hi, n_grid - 1); ++g)
      box[static_cast<std::size_t>(g)] = 1.0;
  }

  const double h_span = std::max(60.0, 3.0 * params.undershoot_time);
  const int h_len = static_cast<int>(h_span / dt) + 1;
  const double peak = hrf_peak_value(params);
  std::vector<double> kernel(static_cast<std::size_t>(h_len));
  for (int i = 0; i < h_len; ++i)
    kernel[static_cast<std::size_t>(i)] = hrf_raw(i * dt, params) / peak;

  // Direct convolution evaluated only at volume sample points.
  for (int i = 0; i < T; ++i) {
    const int g = (sched.n_dropped_initial + i) * oversample;
    double acc = 0.0;
    const int kmax = std::min(h_len - 1, g);
    for (int k = 0; k <= kmax; ++k)
      acc += kernel[static_cast<std::size_t>(k)] * box[static_cast<std::size_t>(g - k)];
    X(i, 0) = acc * dt;
  }

  // Temporal derivative by central differences over one TR.
  if (T >= 2) {
    X(0, 1) = (X(1, 0) - X(0, 0)) / sched.TR;
    X(T - 1, 1) = (X(T - 1, 0) - X(T - 2, 0)) / sched.TR;
    for (int i = 1; i + 1 < T; ++i) X(i, 1) = (X(i + 1, 0) - X(i - 1, 0)) / (2.0 * sched.TR);
  }

  for (int c = 0; c < 2; ++c) {
    const double m = X.col(c).cwiseAbs().maxCoeff();
    if (m > 0.0) X.col(c) /= m;
  }
  return X;
}

double task_column_correlation(const Eigen::MatrixXd& X) {
  const Eigen::VectorXd a = X.col(0).array() - X.col(0).mean();
  const Eigen::VectorXd b = X.col(1).array() - X.col(1).mean();
  const double denom = a.norm() * b.norm();
  return denom > 0.0 ? a.dot(b) / denom : 0.0;
}

}  // namespace surfglm
