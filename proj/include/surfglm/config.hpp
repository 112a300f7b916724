#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surfglm/bayes.hpp"
#include "surfglm/hrf.hpp"
#include "surfglm/scrub.hpp"
#include "surfglm/synth.hpp"

namespace surfglm {

struct SessionInput {
  std::string subject_id;
  std::string visit_id;
  std::string bold_path;
  std::string schedule_path;
  std::string nuisance_path;  // empty = none
};

struct OptimizerConfig {
  double rel_tol = 1e-6;
  int max_iters = 200;
  double fd_step = 1e-4;
};

struct LmmConfig {
  double gamma = 1.0;            // activation threshold feeding the mixed models
  int window_days = 730;
  std::vector<std::string> exclude_subjects;
  int curve_points = 50;
  double curve_upper_quantile = 0.9;
};

/// Simulation recipe: mesh fixture, study layout, ground truth, and the
/// clinical trajectory that pairs with it.
struct SimulateConfig {
  std::string mesh_kind = "grid";  // "grid" | "curved"
  int mesh_nx = 16;
  int mesh_ny = 16;
  double mesh_spacing = 1.0;
  int n_subjects = 1;
  int n_visits = 1;
  std::string group = "ALS";  // group label for the synthesized clinical table
  StimulusSchedule schedule;
  Hyperparameters theta;
  std::optional<InjectionSpec> injection;
  bool sample_fields_from_prior = false;
  bool per_subject_constant_fields = true;
  SpikeSpec spikes;
  double baseline_mean = 1000.0;
  int hand_decline_per_visit = 2;   // ALSFRS hand-item points lost per visit
  int other_decline_per_visit = 3;  // same for the other nine items
  int days_between_visits = 90;
};

struct PipelineConfig {
  std::string config_path;  // where this config was loaded from
  std::string output_dir;
  std::string hemisphere = "left";
  std::string mesh_path;               // empty when simulate provides it
  std::vector<SessionInput> sessions;  // empty when simulate provides them
  std::string clinical_path;           // empty when simulate provides it

  HrfParams hrf;
  ScrubOptions scrub;
  bool scrub_enabled = true;
  HyperPriors priors;
  OptimizerConfig optimizer;
  std::vector<double> gamma_list = {0.0, 1.0, 2.0};
  double alpha = 0.05;
  int excursion_samples = 5000;
  LmmConfig lmm;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency

  std::optional<SimulateConfig> simulate;
};

/// Parses and validates a config file; every unset field gets its default.
/// Throws ConfigError with the offending key on invalid input.
PipelineConfig load_config(const std::string& path);

/// Writes the fully resolved configuration (defaults filled in) so a run
/// directory records exactly what produced it.
void write_resolved_config(const std::string& path, const PipelineConfig& cfg);

}  // namespace surfglm
