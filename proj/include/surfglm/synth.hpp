#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfglm/bayes.hpp"
#include "surfglm/fem.hpp"
#include "surfglm/hrf.hpp"
#include "surfglm/mesh.hpp"
#include "surfglm/rng.hpp"

namespace surfglm {

/// Planar triangulated rectangle: nx x ny vertices at the given spacing,
/// every quad split into two triangles. All vertices masked in.
SurfaceMesh grid_mesh(int nx, int ny, double spacing = 1.0);

/// The same grid lifted onto a smooth bump, giving realistic vertex-area
/// variation for area-weighted tests.
SurfaceMesh curved_patch_mesh(int nx, int ny, double spacing = 1.0,
                              double bump_height = 0.35);

/// Exact draw from N(0, Q^{-1}) by sparse Cholesky back-substitution.
Eigen::VectorXd sample_gmrf(const SparseMat& Q, rng::Engine& eng);

/// Circular activation region injected into the task-amplitude truth.
struct InjectionSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 1.0;
  double amplitude = 1.0;            // percent signal change
  std::vector<double> visit_scale;   // per-visit multiplier; empty = all ones
};

struct SpikeSpec {
  int n_spikes = 0;          // corrupted volumes per session
  double magnitude = 10.0;   // offset in units of the clean-signal SD
};

struct SynthStudyConfig {
  SurfaceMesh mesh;
  int n_subjects = 1;
  int n_visits = 1;
  StimulusSchedule schedule;
  HrfParams hrf;
  Hyperparameters theta;                  // ground-truth kappa/tau/sigma2
  std::optional<InjectionSpec> injection; // added to the first task's field
  bool sample_fields_from_prior = true;   // otherwise fields start at zero
  bool per_subject_constant_fields = true;  // same truth across a subject's visits
  SpikeSpec spikes;
  bool raw_mode = false;        // emit raw BOLD around a baseline instead of
                                // model-space signal
  double baseline_mean = 1000.0;
  std::uint64_t seed = 0;
};

struct SessionTruth {
  std::string subject_id;
  std::string visit_id;
  Eigen::MatrixXd beta;           // V_masked x K true amplitude fields
  std::vector<int> spike_volumes;
};

struct SynthSession {
  std::string subject_id;
  std::string visit_id;
  Eigen::MatrixXd Y;  // T x V_masked; raw BOLD or model-space signal
};

struct SynthStudy {
  MaskedSubmesh submesh;
  Eigen::MatrixXd X_task;  // T x K shared task design (peak-normalized)
  std::vector<SynthSession> sessions;
  std::vector<SessionTruth> truth;
};

/// Forward model: per subject and visit, beta fields (prior draw and/or
/// injected truth), then y = X beta + noise, optional spike volumes, and the
/// raw-BOLD transform when requested. Deterministic in config.seed, with
/// independent per-subject/per-visit streams.
SynthStudy generate_study(const SynthStudyConfig& cfg);

}  // namespace surfglm
