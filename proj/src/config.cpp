#include "surfglm/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "surfglm/errors.hpp"

namespace surfglm {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config field '" + key + "': " + why);
}

double get_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad_key(key, "expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad_key(key, "expected an integer");
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad_key(key, "expected true/false");
  return j.at(key).get<bool>();
}

std::string get_str(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad_key(key, "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& key,
                                 std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) bad_key(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j.at(key)) {
    if (!e.is_number()) bad_key(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

StimulusSchedule parse_schedule(const json& j, const std::string& prefix) {
  StimulusSchedule s;
  s.TR = get_num(j, "TR", s.TR);
  s.n_volumes = get_int(j, "n_volumes", 0);
  s.n_dropped_initial = get_int(j, "n_dropped_initial", 0);
  s.onsets = get_num_list(j, "onsets", {});
  s.durations = get_num_list(j, "durations", {});
  try {
    s.validate();
  } catch (const std::exception& e) {
    bad_key(prefix, e.what());
  }
  return s;
}

Hyperparameters parse_theta(const json& j, const std::string& prefix) {
  std::vector<double> kappa = get_num_list(j, "kappa", {1.0, 1.0});
  std::vector<double> tau = get_num_list(j, "tau", {1.0, 1.0});
  if (kappa.size() != tau.size())
    bad_key(prefix, "kappa and tau must have equal length");
  Hyperparameters th;
  th.kappa = Eigen::Map<Eigen::VectorXd>(kappa.data(),
                                         static_cast<Eigen::Index>(kappa.size()));
  th.tau = Eigen::Map<Eigen::VectorXd>(tau.data(),
                                       static_cast<Eigen::Index>(tau.size()));
  th.sigma2 = get_num(j, "sigma2", 1.0);
  if (th.sigma2 <= 0) bad_key(prefix + ".sigma2", "must be positive");
  for (Eigen::Index k = 0; k < th.kappa.size(); ++k)
    if (th.kappa[k] <= 0 || th.tau[k] <= 0)
      bad_key(prefix, "kappa and tau entries must be positive");
  return th;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  json j = load_json(path);
  PipelineConfig cfg;
  cfg.config_path = path;

  cfg.output_dir = get_str(j, "output_dir", "");
  if (cfg.output_dir.empty()) bad_key("output_dir", "required");
  cfg.hemisphere = get_str(j, "hemisphere", cfg.hemisphere);
  if (cfg.hemisphere != "left" && cfg.hemisphere != "right")
    bad_key("hemisphere", "must be \"left\" or \"right\"");
  cfg.mesh_path = get_str(j, "mesh", "");
  cfg.clinical_path = get_str(j, "clinical", "");

  if (j.contains("sessions")) {
    if (!j.at("sessions").is_array()) bad_key("sessions", "expected an array");
    for (const auto& e : j.at("sessions")) {
      if (!e.is_object()) bad_key("sessions", "entries must be objects");
      SessionInput s;
      s.subject_id = get_str(e, "subject", "");
      s.visit_id = get_str(e, "visit", "");
      s.bold_path = get_str(e, "bold", "");
      s.schedule_path = get_str(e, "schedule", "");
      s.nuisance_path = get_str(e, "nuisance", "");
      if (s.subject_id.empty() || s.visit_id.empty() || s.bold_path.empty() ||
          s.schedule_path.empty())
        bad_key("sessions", "each entry needs subject, visit, bold, schedule");
      cfg.sessions.push_back(std::move(s));
    }
  }

  if (j.contains("hrf")) {
    const json& h = j.at("hrf");
    cfg.hrf.peak_time = get_num(h, "peak_time", cfg.hrf.peak_time);
    cfg.hrf.undershoot_time = get_num(h, "undershoot_time", cfg.hrf.undershoot_time);
    cfg.hrf.peak_dispersion = get_num(h, "peak_dispersion", cfg.hrf.peak_dispersion);
    cfg.hrf.undershoot_dispersion =
        get_num(h, "undershoot_dispersion", cfg.hrf.undershoot_dispersion);
    cfg.hrf.undershoot_ratio = get_num(h, "undershoot_ratio", cfg.hrf.undershoot_ratio);
  }

  if (j.contains("scrub")) {
    const json& s = j.at("scrub");
    cfg.scrub_enabled = get_bool(s, "enabled", cfg.scrub_enabled);
    cfg.scrub.leverage_multiplier =
        get_num(s, "leverage_multiplier", cfg.scrub.leverage_multiplier);
    cfg.scrub.max_flagged_fraction =
        get_num(s, "max_flagged_fraction", cfg.scrub.max_flagged_fraction);
    if (cfg.scrub.leverage_multiplier <= 0)
      bad_key("scrub.leverage_multiplier", "must be positive");
    if (cfg.scrub.max_flagged_fraction < 0 || cfg.scrub.max_flagged_fraction > 1)
      bad_key("scrub.max_flagged_fraction", "must be in [0, 1]");
  }

  if (j.contains("priors")) {
    const json& p = j.at("priors");
    cfg.priors.flat = get_bool(p, "flat", cfg.priors.flat);
    cfg.priors.log_kappa_mean = get_num(p, "log_kappa_mean", cfg.priors.log_kappa_mean);
    cfg.priors.log_kappa_sd = get_num(p, "log_kappa_sd", cfg.priors.log_kappa_sd);
    cfg.priors.log_tau_mean = get_num(p, "log_tau_mean", cfg.priors.log_tau_mean);
    cfg.priors.log_tau_sd = get_num(p, "log_tau_sd", cfg.priors.log_tau_sd);
    cfg.priors.precision_shape = get_num(p, "precision_shape", cfg.priors.precision_shape);
    cfg.priors.precision_rate = get_num(p, "precision_rate", cfg.priors.precision_rate);
    if (cfg.priors.log_kappa_sd <= 0 || cfg.priors.log_tau_sd <= 0)
      bad_key("priors", "prior standard deviations must be positive");
    if (cfg.priors.precision_shape <= 0 || cfg.priors.precision_rate <= 0)
      bad_key("priors", "precision shape/rate must be positive");
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    cfg.optimizer.rel_tol = get_num(o, "rel_tol", cfg.optimizer.rel_tol);
    cfg.optimizer.max_iters = get_int(o, "max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.fd_step = get_num(o, "fd_step", cfg.optimizer.fd_step);
    if (cfg.optimizer.rel_tol <= 0) bad_key("optimizer.rel_tol", "must be positive");
    if (cfg.optimizer.max_iters < 1) bad_key("optimizer.max_iters", "must be >= 1");
  }

  cfg.gamma_list = get_num_list(j, "gamma_list", cfg.gamma_list);
  if (cfg.gamma_list.empty()) bad_key("gamma_list", "must not be empty");
  for (double g : cfg.gamma_list)
    if (g < 0) bad_key("gamma_list", "thresholds must be >= 0");
  cfg.alpha = get_num(j, "alpha", cfg.alpha);
  if (cfg.alpha <= 0 || cfg.alpha >= 1) bad_key("alpha", "must be in (0, 1)");
  cfg.excursion_samples = get_int(j, "excursion_samples", cfg.excursion_samples);
  if (cfg.excursion_samples < 1000)
    bad_key("excursion_samples", "must be >= 1000");

  if (j.contains("lmm")) {
    const json& l = j.at("lmm");
    cfg.lmm.gamma = get_num(l, "gamma", cfg.lmm.gamma);
    cfg.lmm.window_days = get_int(l, "window_days", cfg.lmm.window_days);
    cfg.lmm.curve_points = get_int(l, "curve_points", cfg.lmm.curve_points);
    cfg.lmm.curve_upper_quantile =
        get_num(l, "curve_upper_quantile", cfg.lmm.curve_upper_quantile);
    if (l.contains("exclude_subjects")) {
      if (!l.at("exclude_subjects").is_array())
        bad_key("lmm.exclude_subjects", "expected an array of strings");
      for (const auto& e : l.at("exclude_subjects")) {
        if (!e.is_string()) bad_key("lmm.exclude_subjects", "expected strings");
        cfg.lmm.exclude_subjects.push_back(e.get<std::string>());
      }
    }
    if (cfg.lmm.window_days < 1) bad_key("lmm.window_days", "must be >= 1");
    if (cfg.lmm.curve_points < 2) bad_key("lmm.curve_points", "must be >= 2");
    if (cfg.lmm.curve_upper_quantile <= 0 || cfg.lmm.curve_upper_quantile > 1)
      bad_key("lmm.curve_upper_quantile", "must be in (0, 1]");
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      bad_key("seed", "expected an unsigned integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.workers = get_int(j, "workers", cfg.workers);
  if (cfg.workers < 0) bad_key("workers", "must be >= 0");

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    if (!s.is_object()) bad_key("simulate", "expected an object");
    SimulateConfig sim;
    sim.mesh_kind = get_str(s, "mesh_kind", sim.mesh_kind);
    if (sim.mesh_kind != "grid" && sim.mesh_kind != "curved")
      bad_key("simulate.mesh_kind", "must be \"grid\" or \"curved\"");
    sim.mesh_nx = get_int(s, "mesh_nx", sim.mesh_nx);
    sim.mesh_ny = get_int(s, "mesh_ny", sim.mesh_ny);
    sim.mesh_spacing = get_num(s, "mesh_spacing", sim.mesh_spacing);
    if (sim.mesh_nx < 2 || sim.mesh_ny < 2)
      bad_key("simulate.mesh_nx/ny", "must be >= 2");
    if (sim.mesh_spacing <= 0) bad_key("simulate.mesh_spacing", "must be positive");
    sim.n_subjects = get_int(s, "n_subjects", sim.n_subjects);
    sim.n_visits = get_int(s, "n_visits", sim.n_visits);
    if (sim.n_subjects < 1 || sim.n_visits < 1)
      bad_key("simulate.n_subjects/n_visits", "must be >= 1");
    sim.group = get_str(s, "group", sim.group);
    if (sim.group != "ALS" && sim.group != "HC")
      bad_key("simulate.group", "must be \"ALS\" or \"HC\"");
    if (!s.contains("schedule")) bad_key("simulate.schedule", "required");
    sim.schedule = parse_schedule(s.at("schedule"), "simulate.schedule");
    sim.theta = s.contains("theta") ? parse_theta(s.at("theta"), "simulate.theta")
                                    : parse_theta(json::object(), "simulate.theta");
    if (s.contains("injection")) {
      const json& i = s.at("injection");
      InjectionSpec inj;
      inj.center_x = get_num(i, "center_x", inj.center_x);
      inj.center_y = get_num(i, "center_y", inj.center_y);
      inj.radius = get_num(i, "radius", inj.radius);
      inj.amplitude = get_num(i, "amplitude", inj.amplitude);
      inj.visit_scale = get_num_list(i, "visit_scale", {});
      if (inj.radius <= 0) bad_key("simulate.injection.radius", "must be positive");
      sim.injection = std::move(inj);
    }
    sim.sample_fields_from_prior =
        get_bool(s, "sample_fields_from_prior", sim.sample_fields_from_prior);
    sim.per_subject_constant_fields =
        get_bool(s, "per_subject_constant_fields", sim.per_subject_constant_fields);
    sim.spikes.n_spikes = get_int(s, "spike_volumes", sim.spikes.n_spikes);
    sim.spikes.magnitude = get_num(s, "spike_magnitude", sim.spikes.magnitude);
    sim.baseline_mean = get_num(s, "baseline_mean", sim.baseline_mean);
    if (sim.baseline_mean <= 0) bad_key("simulate.baseline_mean", "must be positive");
    sim.hand_decline_per_visit =
        get_int(s, "hand_decline_per_visit", sim.hand_decline_per_visit);
    sim.other_decline_per_visit =
        get_int(s, "other_decline_per_visit", sim.other_decline_per_visit);
    sim.days_between_visits = get_int(s, "days_between_visits", sim.days_between_visits);
    if (sim.days_between_visits < 1)
      bad_key("simulate.days_between_visits", "must be >= 1");
    cfg.simulate = std::move(sim);
  }

  if (!cfg.simulate) {
    if (cfg.mesh_path.empty()) bad_key("mesh", "required unless simulate is configured");
    if (cfg.sessions.empty())
      bad_key("sessions", "required unless simulate is configured");
  }
  return cfg;
}

void write_resolved_config(const std::string& path, const PipelineConfig& cfg) {
  json j;
  j["output_dir"] = cfg.output_dir;
  j["hemisphere"] = cfg.hemisphere;
  if (!cfg.mesh_path.empty()) j["mesh"] = cfg.mesh_path;
  if (!cfg.clinical_path.empty()) j["clinical"] = cfg.clinical_path;
  if (!cfg.sessions.empty()) {
    json arr = json::array();
    for (const auto& s : cfg.sessions) {
      json e;
      e["subject"] = s.subject_id;
      e["visit"] = s.visit_id;
      e["bold"] = s.bold_path;
      e["schedule"] = s.schedule_path;
      if (!s.nuisance_path.empty()) e["nuisance"] = s.nuisance_path;
      arr.push_back(std::move(e));
    }
    j["sessions"] = std::move(arr);
  }
  j["hrf"] = {{"peak_time", cfg.hrf.peak_time},
              {"undershoot_time", cfg.hrf.undershoot_time},
              {"peak_dispersion", cfg.hrf.peak_dispersion},
              {"undershoot_dispersion", cfg.hrf.undershoot_dispersion},
              {"undershoot_ratio", cfg.hrf.undershoot_ratio}};
  j["scrub"] = {{"enabled", cfg.scrub_enabled},
                {"leverage_multiplier", cfg.scrub.leverage_multiplier},
                {"max_flagged_fraction", cfg.scrub.max_flagged_fraction}};
  j["priors"] = {{"flat", cfg.priors.flat},
                 {"log_kappa_mean", cfg.priors.log_kappa_mean},
                 {"log_kappa_sd", cfg.priors.log_kappa_sd},
                 {"log_tau_mean", cfg.priors.log_tau_mean},
                 {"log_tau_sd", cfg.priors.log_tau_sd},
                 {"precision_shape", cfg.priors.precision_shape},
                 {"precision_rate", cfg.priors.precision_rate}};
  j["optimizer"] = {{"rel_tol", cfg.optimizer.rel_tol},
                    {"max_iters", cfg.optimizer.max_iters},
                    {"fd_step", cfg.optimizer.fd_step}};
  j["gamma_list"] = cfg.gamma_list;
  j["alpha"] = cfg.alpha;
  j["excursion_samples"] = cfg.excursion_samples;
  j["lmm"] = {{"gamma", cfg.lmm.gamma},
              {"window_days", cfg.lmm.window_days},
              {"exclude_subjects", cfg.lmm.exclude_subjects},
              {"curve_points", cfg.lmm.curve_points},
              {"curve_upper_quantile", cfg.lmm.curve_upper_quantile}};
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;

  if (cfg.simulate) {
    const SimulateConfig& sim = *cfg.simulate;
    json s;
    s["mesh_kind"] = sim.mesh_kind;
    s["mesh_nx"] = sim.mesh_nx;
    s["mesh_ny"] = sim.mesh_ny;
    s["mesh_spacing"] = sim.mesh_spacing;
    s["n_subjects"] = sim.n_subjects;
    s["n_visits"] = sim.n_visits;
    s["group"] = sim.group;
    s["schedule"] = {{"TR", sim.schedule.TR},
                     {"n_volumes", sim.schedule.n_volumes},
                     {"n_dropped_initial", sim.schedule.n_dropped_initial},
                     {"onsets", sim.schedule.onsets},
                     {"durations", sim.schedule.durations}};
    s["theta"] = {{"kappa", std::vector<double>(sim.theta.kappa.data(),
                                                sim.theta.kappa.data() + sim.theta.kappa.size())},
                  {"tau", std::vector<double>(sim.theta.tau.data(),
                                              sim.theta.tau.data() + sim.theta.tau.size())},
                  {"sigma2", sim.theta.sigma2}};
    if (sim.injection) {
      s["injection"] = {{"center_x", sim.injection->center_x},
                        {"center_y", sim.injection->center_y},
                        {"radius", sim.injection->radius},
                        {"amplitude", sim.injection->amplitude},
                        {"visit_scale", sim.injection->visit_scale}};
    }
    s["sample_fields_from_prior"] = sim.sample_fields_from_prior;
    s["per_subject_constant_fields"] = sim.per_subject_constant_fields;
    s["spike_volumes"] = sim.spikes.n_spikes;
    s["spike_magnitude"] = sim.spikes.magnitude;
    s["baseline_mean"] = sim.baseline_mean;
    s["hand_decline_per_visit"] = sim.hand_decline_per_visit;
    s["other_decline_per_visit"] = sim.other_decline_per_visit;
    s["days_between_visits"] = sim.days_between_visits;
    j["simulate"] = std::move(s);
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write resolved config: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace surfglm
