#include "surfglm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "surfglm/bayes.hpp"
#include "surfglm/classical.hpp"
#include "surfglm/errors.hpp"
#include "surfglm/excursions.hpp"
#include "surfglm/fem.hpp"
#include "surfglm/io.hpp"
#include "surfglm/log.hpp"
#include "surfglm/mesh.hpp"
#include "surfglm/models.hpp"
#include "surfglm/parallel.hpp"
#include "surfglm/prep.hpp"
#include "surfglm/scrub.hpp"
#include "surfglm/summary.hpp"
#include "surfglm/synth.hpp"

namespace surfglm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw DataError("cannot create directory " + path + ": " + ec.message());
}

std::string join_path(const std::string& a, const std::string& b) {
  return (fs::path(a) / b).string();
}

// ---- prepared-session package (binary, magic SGPREP01) ----

struct PrepPackage {
  SessionData session;
  ScrubResult scrub;  // leverage empty when scrubbing disabled
};

void append_u32(std::string& bytes, std::uint32_t v) {
  bytes.append(reinterpret_cast<const char*>(&v), 4);
}
void append_f64(std::string& bytes, double v) {
  bytes.append(reinterpret_cast<const char*>(&v), 8);
}
void append_str(std::string& bytes, const std::string& s) {
  append_u32(bytes, static_cast<std::uint32_t>(s.size()));
  bytes.append(s);
}
void append_mat(std::string& bytes, const Eigen::MatrixXd& M) {
  append_u32(bytes, static_cast<std::uint32_t>(M.rows()));
  append_u32(bytes, static_cast<std::uint32_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) append_f64(bytes, M(i, j));
}

struct PackReader {
  std::string bytes;
  std::size_t pos = 0;
  std::string path;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw DataError("truncated file: " + path);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, bytes.data() + pos, 8);
    pos += 8;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
  Eigen::MatrixXd mat() {
    const std::uint32_t r = u32();
    const std::uint32_t c = u32();
    Eigen::MatrixXd M(r, c);
    for (std::uint32_t i = 0; i < r; ++i)
      for (std::uint32_t j = 0; j < c; ++j) M(i, j) = f64();
    return M;
  }
};

void write_prep_package(const std::string& path, const PrepPackage& pkg) {
  std::string bytes;
  bytes.append("SGPREP01", 8);
  append_str(bytes, pkg.session.subject_id);
  append_str(bytes, pkg.session.visit_id);
  append_u32(bytes, static_cast<std::uint32_t>(pkg.session.keep_flags.size()));
  for (bool k : pkg.session.keep_flags) bytes.push_back(k ? 1 : 0);
  append_u32(bytes, static_cast<std::uint32_t>(pkg.session.n_projected));
  append_f64(bytes, pkg.session.dhrf_correlation);
  append_mat(bytes, pkg.session.Y);
  append_mat(bytes, pkg.session.X_task);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

SessionData read_prep_package(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();

  PackReader r;
  r.bytes = ss.str();
  r.path = path;
  r.need(8);
  if (r.bytes.compare(0, 8, "SGPREP01") != 0)
    throw DataError("bad magic in " + path);
  r.pos = 8;

  SessionData s;
  s.subject_id = r.str();
  s.visit_id = r.str();
  const std::uint32_t t_orig = r.u32();
  s.keep_flags.resize(t_orig);
  r.need(t_orig);
  for (std::uint32_t i = 0; i < t_orig; ++i)
    s.keep_flags[i] = r.bytes[r.pos + i] != 0;
  r.pos += t_orig;
  s.n_projected = static_cast<int>(r.u32());
  s.dhrf_correlation = r.f64();
  s.Y = r.mat();
  s.X_task = r.mat();
  s.N_nuisance.resize(s.Y.rows(), 0);
  s.residualized = true;
  if (r.pos != r.bytes.size()) throw DataError("trailing bytes in " + path);
  return s;
}

Eigen::VectorXd expand_to_full(const Eigen::VectorXd& masked_values,
                               const MaskedSubmesh& sub, int v_full,
                               double fill) {
  Eigen::VectorXd full = Eigen::VectorXd::Constant(v_full, fill);
  for (int v = 0; v < static_cast<int>(sub.to_full.size()); ++v)
    full[sub.to_full[static_cast<size_t>(v)]] = masked_values[v];
  return full;
}

std::vector<bool> restrict_to_masked(const std::vector<bool>& full,
                                     const MaskedSubmesh& sub) {
  std::vector<bool> masked(sub.to_full.size());
  for (size_t v = 0; v < sub.to_full.size(); ++v)
    masked[v] = full[static_cast<size_t>(sub.to_full[v])];
  return masked;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON in " + path);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path);
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, bool force)
    : cfg_(std::move(cfg)), force_(force) {
  if (cfg_.output_dir.empty()) throw ConfigError("output_dir is empty");
  ensure_dir(cfg_.output_dir);
  write_resolved_config(out("config.resolved.json"), cfg_);
}

std::string Pipeline::out(const std::string& relative) const {
  return join_path(cfg_.output_dir, relative);
}

std::string Pipeline::session_key(const SessionInput& s) const {
  return s.subject_id + "_" + s.visit_id;
}

std::string Pipeline::effective_mesh_path() const {
  if (!cfg_.mesh_path.empty()) return cfg_.mesh_path;
  return out("data/mesh.txt");
}

std::string Pipeline::effective_clinical_path() const {
  if (!cfg_.clinical_path.empty()) return cfg_.clinical_path;
  return out("data/clinical.tsv");
}

std::vector<SessionInput> Pipeline::effective_sessions() const {
  if (!cfg_.sessions.empty()) return cfg_.sessions;
  const std::string index_path = out("data/sessions.json");
  if (!fs::exists(index_path))
    throw DataError("no sessions configured and " + index_path +
                    " not found (run the simulate stage first)");
  json j = read_json_file(index_path);
  std::vector<SessionInput> sessions;
  for (const auto& e : j.at("sessions")) {
    SessionInput s;
    s.subject_id = e.at("subject").get<std::string>();
    s.visit_id = e.at("visit").get<std::string>();
    s.bold_path = out(e.at("bold").get<std::string>());
    s.schedule_path = out(e.at("schedule").get<std::string>());
    if (e.contains("nuisance"))
      s.nuisance_path = out(e.at("nuisance").get<std::string>());
    sessions.push_back(std::move(s));
  }
  if (sessions.empty()) throw DataError("session index is empty: " + index_path);
  return sessions;
}

std::string Pipeline::config_fingerprint() const {
  // Checksum of the resolved config with throughput-only fields removed, so
  // changing worker count never invalidates previous results.
  const std::string resolved = out("config.resolved.json");
  json j = read_json_file(resolved);
  j.erase("workers");
  const std::string text = j.dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text.data(), text.size())));
  return buf;
}

bool Pipeline::stage_done(const std::string& manifest_path,
                          const std::map<std::string, std::string>& inputs,
                          const std::string& stage) const {
  if (force_) return false;
  if (!manifest_satisfied(manifest_path, inputs)) return false;
  log_info(stage + ": up to date, skipping (use --force to rerun)");
  return true;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

void Pipeline::simulate() {
  if (!cfg_.simulate)
    throw ConfigError("simulate stage requires a \"simulate\" config section");
  const SimulateConfig& sim = *cfg_.simulate;

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  const std::string manifest_path = out("data/manifest.json");
  if (fs::exists(out("data")) && stage_done(manifest_path, inputs, "simulate"))
    return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("data"));
  ensure_dir(out("data/truth"));

  SurfaceMesh mesh = sim.mesh_kind == "grid"
                         ? grid_mesh(sim.mesh_nx, sim.mesh_ny, sim.mesh_spacing)
                         : curved_patch_mesh(sim.mesh_nx, sim.mesh_ny, sim.mesh_spacing);
  save_mesh(mesh, out("data/mesh.txt"));

  SynthStudyConfig scfg;
  scfg.mesh = mesh;
  scfg.n_subjects = sim.n_subjects;
  scfg.n_visits = sim.n_visits;
  scfg.schedule = sim.schedule;
  scfg.hrf = cfg_.hrf;
  scfg.theta = sim.theta;
  scfg.injection = sim.injection;
  scfg.sample_fields_from_prior = sim.sample_fields_from_prior;
  scfg.per_subject_constant_fields = sim.per_subject_constant_fields;
  scfg.spikes = sim.spikes;
  scfg.raw_mode = true;
  scfg.baseline_mean = sim.baseline_mean;
  scfg.seed = cfg_.seed;
  SynthStudy study = generate_study(scfg);

  const int v_full = mesh.n_vertices();
  write_schedule(out("data/schedule.json"), sim.schedule);

  std::map<std::string, std::string> outputs;
  outputs[out("data/mesh.txt")] = checksum_file(out("data/mesh.txt"));
  outputs[out("data/schedule.json")] = checksum_file(out("data/schedule.json"));

  json session_index = json::array();
  json truth_index = json::object();
  for (size_t i = 0; i < study.sessions.size(); ++i) {
    const SynthSession& sess = study.sessions[i];
    const SessionTruth& truth = study.truth[i];
    const std::string key = sess.subject_id + "_" + sess.visit_id;

    // Expand masked columns onto the full vertex list; unmasked vertices
    // carry plain baseline signal so the file is a complete surface.
    Eigen::MatrixXd full(sess.Y.rows(), v_full);
    full.setConstant(sim.baseline_mean);
    for (int v = 0; v < static_cast<int>(study.submesh.to_full.size()); ++v)
      full.col(study.submesh.to_full[static_cast<size_t>(v)]) = sess.Y.col(v);
    const std::string bold_rel = "data/" + key + ".bold";
    write_bold(out(bold_rel), full);
    outputs[out(bold_rel)] = checksum_file(out(bold_rel));

    json se;
    se["subject"] = sess.subject_id;
    se["visit"] = sess.visit_id;
    se["bold"] = bold_rel;
    se["schedule"] = "data/schedule.json";
    session_index.push_back(std::move(se));

    for (int k = 0; k < static_cast<int>(truth.beta.cols()); ++k) {
      const std::string map_rel =
          "data/truth/" + key + ".beta.k" + std::to_string(k) + ".map";
      write_vertex_map(out(map_rel),
                       expand_to_full(truth.beta.col(k), study.submesh, v_full, 0.0));
      outputs[out(map_rel)] = checksum_file(out(map_rel));
    }
    truth_index[key] = {{"spike_volumes", truth.spike_volumes}};
  }
  write_json_file(out("data/sessions.json"), json{{"sessions", session_index}});
  outputs[out("data/sessions.json")] = checksum_file(out("data/sessions.json"));

  json truth_study;
  truth_study["theta"] = {{"kappa", to_vec(sim.theta.kappa)},
                          {"tau", to_vec(sim.theta.tau)},
                          {"sigma2", sim.theta.sigma2}};
  if (sim.injection) {
    truth_study["injection"] = {{"center_x", sim.injection->center_x},
                                {"center_y", sim.injection->center_y},
                                {"radius", sim.injection->radius},
                                {"amplitude", sim.injection->amplitude},
                                {"visit_scale", sim.injection->visit_scale}};
  }
  truth_study["sessions"] = truth_index;
  write_json_file(out("data/truth/study.json"), truth_study);
  outputs[out("data/truth/study.json")] = checksum_file(out("data/truth/study.json"));

  // Clinical table aligned with the imaging visits.
  std::vector<ClinicalVisit> visits;
  const long base_date = parse_date("2022-06-15");
  for (int s = 0; s < sim.n_subjects; ++s) {
    for (int j = 0; j < sim.n_visits; ++j) {
      ClinicalVisit v;
      v.subject_id = study.sessions[static_cast<size_t>(s * sim.n_visits)].subject_id;
      v.group = sim.group;
      v.visit_id = study.sessions[static_cast<size_t>(s * sim.n_visits + j)].visit_id;
      v.enrollment_date = base_date + s;  // staggered enrollment
      v.visit_date = v.enrollment_date + long(j) * sim.days_between_visits;
      if (sim.group == "ALS") v.onset_date = v.enrollment_date - 180;

      int hand_total = 12, other_total = 36;
      if (sim.group == "ALS") {
        // Subjects cycle through slow/base/fast progression (1x, 1.5x, 2x of
        // the configured per-visit decline) so the cohort's disability values
        // are heterogeneous, as the downstream spline models expect.
        const int speed = 2 + s % 3;
        hand_total = std::max(0, 12 - j * sim.hand_decline_per_visit * speed / 2);
        other_total = std::max(0, 36 - j * sim.other_decline_per_visit * speed / 2);
      }
      // Distribute totals over items greedily (4s first).
      int remaining = hand_total;
      for (int i = 0; i < 3; ++i) {
        const int give = std::min(4, remaining);
        v.items[static_cast<size_t>(kHandItems[static_cast<size_t>(i)])] = give;
        remaining -= give;
      }
      remaining = other_total;
      for (int i = 0; i < 12; ++i) {
        if (i == kHandItems[0] || i == kHandItems[1] || i == kHandItems[2]) continue;
        const int give = std::min(4, remaining);
        v.items[static_cast<size_t>(i)] = give;
        remaining -= give;
      }
      visits.push_back(std::move(v));
    }
  }
  write_clinical_tsv(out("data/clinical.tsv"), visits);
  outputs[out("data/clinical.tsv")] = checksum_file(out("data/clinical.tsv"));

  StageManifest m;
  m.stage = "simulate";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("simulate: wrote " + std::to_string(study.sessions.size()) +
           " sessions in " + std::to_string(m.wall_seconds) + "s");
}

// ---------------------------------------------------------------------------
// prep
// ---------------------------------------------------------------------------

void Pipeline::prep() {
  const std::vector<SessionInput> sessions = effective_sessions();
  const std::string mesh_path = effective_mesh_path();

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  inputs[mesh_path] = checksum_file(mesh_path);
  for (const auto& s : sessions) {
    inputs[s.bold_path] = checksum_file(s.bold_path);
    inputs[s.schedule_path] = checksum_file(s.schedule_path);
    if (!s.nuisance_path.empty())
      inputs[s.nuisance_path] = checksum_file(s.nuisance_path);
  }
  const std::string manifest_path = out("prep/manifest.json");
  if (stage_done(manifest_path, inputs, "prep")) return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("prep"));
  SurfaceMesh mesh = load_mesh(mesh_path);
  MaskedSubmesh sub = masked_submesh(mesh);

  struct PrepOut {
    std::string key;
    std::string package_path;
    json sidecar;
    bool usable = true;
  };
  std::vector<PrepOut> results(sessions.size());

  const int workers =
      cfg_.workers > 0 ? cfg_.workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  parallel_for(static_cast<int>(sessions.size()), workers, [&](int i) {
    const SessionInput& si = sessions[static_cast<size_t>(i)];
    const std::string key = session_key(si);
    Eigen::MatrixXd bold;
    try {
      bold = read_bold(si.bold_path);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (checksum " +
                      checksum_file(si.bold_path) + ")");
    }
    if (bold.cols() != mesh.n_vertices())
      throw DataError(si.bold_path + ": " + std::to_string(bold.cols()) +
                      " vertices, mesh has " + std::to_string(mesh.n_vertices()));
    StimulusSchedule sched = read_schedule(si.schedule_path);
    if (bold.rows() != sched.n_volumes)
      throw DataError(si.bold_path + ": " + std::to_string(bold.rows()) +
                      " volumes, schedule says " + std::to_string(sched.n_volumes));

    // Restrict to masked vertices (column subset, masked order).
    Eigen::MatrixXd Y(bold.rows(), sub.mesh.n_vertices());
    for (int v = 0; v < sub.mesh.n_vertices(); ++v)
      Y.col(v) = bold.col(sub.to_full[static_cast<size_t>(v)]);

    Eigen::MatrixXd X = build_task_regressors(sched, cfg_.hrf);
    Eigen::MatrixXd N(bold.rows(), 0);
    if (!si.nuisance_path.empty()) {
      N = read_matrix_tsv(si.nuisance_path);
      if (N.rows() != bold.rows())
        throw DataError(si.nuisance_path + ": rows != BOLD volumes");
    }

    ScrubResult scrub;
    std::vector<bool> keep(static_cast<size_t>(bold.rows()), true);
    if (cfg_.scrub_enabled) {
      scrub = scrub_session(Y, cfg_.scrub);
      keep = scrub.keep;
    }

    PrepOut& po = results[static_cast<size_t>(i)];
    po.key = key;
    po.sidecar["subject"] = si.subject_id;
    po.sidecar["visit"] = si.visit_id;
    po.sidecar["n_volumes"] = static_cast<int>(bold.rows());
    if (cfg_.scrub_enabled) {
      po.sidecar["scrub"] = {{"n_flagged", scrub.n_flagged},
                             {"flagged_fraction", scrub.flagged_fraction()},
                             {"median_leverage", scrub.median_leverage},
                             {"threshold", scrub.threshold},
                             {"n_components", scrub.n_components},
                             {"session_usable", scrub.session_usable}};
      if (!scrub.session_usable) {
        po.usable = false;
        log_warn("prep: " + key + " excluded (" +
                 std::to_string(100.0 * scrub.flagged_fraction()) +
                 "% of volumes flagged)");
        return;
      }
    }

    SessionData sd = prepare_session(Y, X, N, keep, si.subject_id, si.visit_id);
    po.sidecar["n_kept"] = sd.n_kept();
    po.sidecar["n_projected"] = sd.n_projected;
    po.sidecar["residual_df"] = sd.residual_df();
    po.sidecar["dhrf_correlation"] = sd.dhrf_correlation;

    po.package_path = out("prep/" + key + ".prep");
    write_prep_package(po.package_path, PrepPackage{std::move(sd), scrub});
  });

  std::map<std::string, std::string> outputs;
  json index = json::array();
  for (const auto& po : results) {
    const std::string sidecar_path = out("prep/" + po.key + ".json");
    write_json_file(sidecar_path, po.sidecar);
    outputs[sidecar_path] = checksum_file(sidecar_path);
    if (po.usable) {
      outputs[po.package_path] = checksum_file(po.package_path);
      index.push_back(po.key);
    }
  }
  write_json_file(out("prep/index.json"), json{{"usable_sessions", index}});
  outputs[out("prep/index.json")] = checksum_file(out("prep/index.json"));

  StageManifest m;
  m.stage = "prep";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("prep: prepared " + std::to_string(index.size()) + "/" +
           std::to_string(sessions.size()) + " sessions in " +
           std::to_string(m.wall_seconds) + "s");
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

void Pipeline::fit() {
  const std::string mesh_path = effective_mesh_path();
  const std::string index_path = out("prep/index.json");
  if (!fs::exists(index_path))
    throw DataError("prep outputs not found (run prep first): " + index_path);

  std::vector<std::string> keys;
  const json prep_index = read_json_file(index_path);
  for (const auto& k : prep_index.at("usable_sessions"))
    keys.push_back(k.get<std::string>());
  if (keys.empty()) throw DataError("no usable sessions after preparation");

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  inputs[mesh_path] = checksum_file(mesh_path);
  inputs[index_path] = checksum_file(index_path);
  for (const auto& key : keys) {
    const std::string p = out("prep/" + key + ".prep");
    inputs[p] = checksum_file(p);
  }
  const std::string manifest_path = out("fit/manifest.json");
  if (stage_done(manifest_path, inputs, "fit")) return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("fit"));
  SurfaceMesh mesh = load_mesh(mesh_path);
  MaskedSubmesh sub = masked_submesh(mesh);
  FemMatrices fem = assemble_fem(sub.mesh);
  const int v_full = mesh.n_vertices();

  // Group sessions by subject, preserving visit order.
  std::map<std::string, std::vector<std::string>> by_subject;
  std::map<std::string, SessionData> loaded;
  for (const auto& key : keys) {
    SessionData sd = read_prep_package(out("prep/" + key + ".prep"));
    by_subject[sd.subject_id].push_back(key);
    loaded.emplace(key, std::move(sd));
  }

  struct SubjectWork {
    std::string subject;
    std::vector<std::string> keys;
    json fit_json;
    std::vector<std::pair<std::string, Eigen::VectorXd>> maps;  // rel path, data
    double wall = 0.0;
  };
  std::vector<SubjectWork> work;
  for (auto& [subject, skeys] : by_subject) {
    SubjectWork w;
    w.subject = subject;
    w.keys = skeys;
    work.push_back(std::move(w));
  }

  const int workers =
      cfg_.workers > 0 ? cfg_.workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  parallel_for(static_cast<int>(work.size()), workers, [&](int wi) {
    SubjectWork& w = work[static_cast<size_t>(wi)];
    const auto ts = std::chrono::steady_clock::now();

    std::vector<SessionData> sessions;
    for (const auto& key : w.keys) sessions.push_back(loaded.at(key));

    std::vector<SessionStats> stats;
    stats.reserve(sessions.size());
    for (const auto& sd : sessions) stats.push_back(session_stats(sd));

    BayesContext ctx(fem, stats);
    Hyperparameters init = initial_hyperparameters(sessions);
    BayesFitOptions opts;
    opts.priors = cfg_.priors;
    opts.rel_tol = cfg_.optimizer.rel_tol;
    opts.max_iters = cfg_.optimizer.max_iters;
    opts.fd_step = cfg_.optimizer.fd_step;
    BayesFit bfit = fit_bayes_longitudinal(ctx, init, opts);
    if (!bfit.converged)
      log_warn("fit: " + w.subject + ": optimizer stopped before convergence (" +
               std::to_string(bfit.iterations) + " iterations)");

    w.fit_json["subject"] = w.subject;
    w.fit_json["hemisphere"] = cfg_.hemisphere;
    w.fit_json["sessions"] = w.keys;
    w.fit_json["kappa"] = to_vec(bfit.theta.kappa);
    w.fit_json["tau"] = to_vec(bfit.theta.tau);
    w.fit_json["sigma2"] = bfit.theta.sigma2;
    w.fit_json["log_marginal"] = bfit.log_marginal;
    w.fit_json["objective"] = bfit.objective;
    w.fit_json["iterations"] = bfit.iterations;
    w.fit_json["n_evals"] = bfit.n_evals;
    w.fit_json["converged"] = bfit.converged;
    w.fit_json["init"] = {{"kappa", to_vec(init.kappa)},
                          {"tau", to_vec(init.tau)},
                          {"sigma2", init.sigma2}};

    json classical_meta = json::object();
    for (size_t j = 0; j < sessions.size(); ++j) {
      const std::string& key = w.keys[j];
      SessionPosterior post = ctx.posterior(bfit.theta, static_cast<int>(j));
      for (int k = 0; k < post.mu.cols(); ++k)
        w.maps.emplace_back(
            "fit/" + key + ".mean.k" + std::to_string(k) + ".map",
            expand_to_full(post.mu.col(k), sub, v_full, 0.0));

      ClassicalFit cls = fit_classical(sessions[j]);
      w.maps.emplace_back("fit/" + key + ".classical.beta.k0.map",
                          expand_to_full(cls.beta.row(0).transpose(), sub, v_full, 0.0));
      w.maps.emplace_back("fit/" + key + ".classical.t.k0.map",
                          expand_to_full(cls.t.row(0).transpose(), sub, v_full, 0.0));
      w.maps.emplace_back("fit/" + key + ".classical.p.k0.map",
                          expand_to_full(cls.p.row(0).transpose(), sub, v_full, 1.0));
      classical_meta[key] = {{"df", cls.df}};
    }
    w.fit_json["classical"] = classical_meta;
    w.wall = seconds_since(ts);
    w.fit_json["wall_seconds"] = w.wall;
    log_info("fit: " + w.subject + " done in " + std::to_string(w.wall) + "s (" +
             std::to_string(bfit.iterations) + " iterations, " +
             std::to_string(bfit.n_evals) + " evaluations)");
  });

  std::map<std::string, std::string> outputs;
  for (const auto& w : work) {
    const std::string fit_path = out("fit/" + w.subject + ".fit.json");
    write_json_file(fit_path, w.fit_json);
    outputs[fit_path] = checksum_file(fit_path);
    for (const auto& [rel, values] : w.maps) {
      write_vertex_map(out(rel), values);
      outputs[out(rel)] = checksum_file(out(rel));
    }
  }

  StageManifest m;
  m.stage = "fit";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("fit: " + std::to_string(work.size()) + " subjects in " +
           std::to_string(m.wall_seconds) + "s");
}

// ---------------------------------------------------------------------------
// excur
// ---------------------------------------------------------------------------

void Pipeline::excur() {
  const std::string mesh_path = effective_mesh_path();
  const std::string index_path = out("prep/index.json");
  if (!fs::exists(index_path))
    throw DataError("prep outputs not found (run prep first): " + index_path);

  std::vector<std::string> keys;
  const json prep_index = read_json_file(index_path);
  for (const auto& k : prep_index.at("usable_sessions"))
    keys.push_back(k.get<std::string>());

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  inputs[mesh_path] = checksum_file(mesh_path);
  inputs[index_path] = checksum_file(index_path);
  std::map<std::string, std::vector<std::string>> by_subject;
  std::map<std::string, SessionData> loaded;
  for (const auto& key : keys) {
    const std::string p = out("prep/" + key + ".prep");
    inputs[p] = checksum_file(p);
    SessionData sd = read_prep_package(p);
    by_subject[sd.subject_id].push_back(key);
    loaded.emplace(key, std::move(sd));
  }
  for (const auto& [subject, skeys] : by_subject) {
    const std::string p = out("fit/" + subject + ".fit.json");
    if (!fs::exists(p))
      throw DataError("fit output not found (run fit first): " + p);
    inputs[p] = checksum_file(p);
  }
  const std::string manifest_path = out("excur/manifest.json");
  if (stage_done(manifest_path, inputs, "excur")) return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("excur"));
  SurfaceMesh mesh = load_mesh(mesh_path);
  MaskedSubmesh sub = masked_submesh(mesh);
  FemMatrices fem = assemble_fem(sub.mesh);
  const int v_full = mesh.n_vertices();

  struct SubjectWork {
    std::string subject;
    std::vector<std::string> keys;
    // rel path -> (mask, sidecar)
    std::vector<std::tuple<std::string, std::vector<bool>, json>> masks;
  };
  std::vector<SubjectWork> work;
  int subject_index = 0;
  for (auto& [subject, skeys] : by_subject) {
    SubjectWork w;
    w.subject = subject;
    w.keys = skeys;
    work.push_back(std::move(w));
    ++subject_index;
  }
  (void)subject_index;

  const int workers =
      cfg_.workers > 0 ? cfg_.workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  parallel_for(static_cast<int>(work.size()), workers, [&](int wi) {
    SubjectWork& w = work[static_cast<size_t>(wi)];
    json fit_json = read_json_file(out("fit/" + w.subject + ".fit.json"));
    Hyperparameters theta;
    std::vector<double> kappa = fit_json.at("kappa").get<std::vector<double>>();
    std::vector<double> tau = fit_json.at("tau").get<std::vector<double>>();
    theta.kappa = Eigen::Map<Eigen::VectorXd>(kappa.data(),
                                              static_cast<Eigen::Index>(kappa.size()));
    theta.tau = Eigen::Map<Eigen::VectorXd>(tau.data(),
                                            static_cast<Eigen::Index>(tau.size()));
    theta.sigma2 = fit_json.at("sigma2").get<double>();

    std::vector<SessionData> sessions;
    for (const auto& key : w.keys) sessions.push_back(loaded.at(key));
    std::vector<SessionStats> stats;
    for (const auto& sd : sessions) stats.push_back(session_stats(sd));
    BayesContext ctx(fem, stats);

    for (size_t j = 0; j < sessions.size(); ++j) {
      const std::string& key = w.keys[j];
      SessionPosterior post = ctx.posterior(theta, static_cast<int>(j));

      ExcursionOptions eopts;
      eopts.alpha = cfg_.alpha;
      eopts.n_samples = cfg_.excursion_samples;
      eopts.seed = rng::derive_seed(
          cfg_.seed, {0x45584355ULL, std::uint64_t(wi), std::uint64_t(j)});
      std::vector<ExcursionResult> family =
          excursion_family(post, 0, cfg_.gamma_list, eopts);

      for (size_t gi = 0; gi < family.size(); ++gi) {
        const ExcursionResult& ex = family[gi];
        if (ex.mc_warning)
          log_warn("excur: " + key + " gamma=" + std::to_string(ex.gamma) +
                   ": Monte Carlo sample count is small for alpha=" +
                   std::to_string(ex.alpha));

        std::vector<bool> full(static_cast<size_t>(v_full), false);
        for (int v = 0; v < static_cast<int>(sub.to_full.size()); ++v)
          full[static_cast<size_t>(sub.to_full[static_cast<size_t>(v)])] =
              ex.active[static_cast<size_t>(v)];

        json sidecar;
        sidecar["subject"] = sessions[j].subject_id;
        sidecar["visit"] = sessions[j].visit_id;
        sidecar["method"] = "bayes";
        sidecar["gamma"] = ex.gamma;
        sidecar["alpha"] = ex.alpha;
        sidecar["n_samples"] = ex.n_samples;
        sidecar["seed"] = ex.seed;
        sidecar["joint_prob"] = ex.joint_prob;
        sidecar["joint_prob_se"] = ex.joint_prob_se;
        sidecar["n_active"] = ex.n_active;
        sidecar["mc_warning"] = ex.mc_warning;
        w.masks.emplace_back(
            "excur/" + key + ".bayes.g" + std::to_string(gi) + ".mask", full,
            sidecar);
      }

      // Classical maps thresholded at the same alpha over the masked set.
      ClassicalFit cls = fit_classical(sessions[j]);
      Eigen::VectorXd p0 = cls.p.row(0).transpose();
      std::vector<bool> bonf = bonferroni_reject(p0, cfg_.alpha);
      std::vector<bool> fdr = bh_reject(p0, cfg_.alpha);
      for (const auto& [method, rej] :
           {std::make_pair(std::string("classical-bonferroni"), bonf),
            std::make_pair(std::string("classical-fdr"), fdr)}) {
        std::vector<bool> full(static_cast<size_t>(v_full), false);
        int n_active = 0;
        for (int v = 0; v < static_cast<int>(sub.to_full.size()); ++v) {
          full[static_cast<size_t>(sub.to_full[static_cast<size_t>(v)])] =
              rej[static_cast<size_t>(v)];
          n_active += rej[static_cast<size_t>(v)] ? 1 : 0;
        }
        json sidecar;
        sidecar["subject"] = sessions[j].subject_id;
        sidecar["visit"] = sessions[j].visit_id;
        sidecar["method"] = method;
        sidecar["alpha"] = cfg_.alpha;
        sidecar["df"] = cls.df;
        sidecar["n_active"] = n_active;
        const std::string suffix =
            method == "classical-bonferroni" ? "bonf" : "fdr";
        w.masks.emplace_back("excur/" + key + "." + suffix + ".mask", full,
                             sidecar);
      }
    }
  });

  std::map<std::string, std::string> outputs;
  json mask_index = json::array();
  for (const auto& w : work) {
    for (const auto& [rel, mask, sidecar] : w.masks) {
      write_active_mask(out(rel), mask);
      write_json_file(out(rel + ".json"), sidecar);
      outputs[out(rel)] = checksum_file(out(rel));
      outputs[out(rel + ".json")] = checksum_file(out(rel + ".json"));
      mask_index.push_back(rel);
    }
  }
  write_json_file(out("excur/index.json"), json{{"masks", mask_index}});
  outputs[out("excur/index.json")] = checksum_file(out("excur/index.json"));

  StageManifest m;
  m.stage = "excur";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("excur: " + std::to_string(mask_index.size()) + " maps in " +
           std::to_string(m.wall_seconds) + "s");
}

// ---------------------------------------------------------------------------
// summarize
// ---------------------------------------------------------------------------

void Pipeline::summarize() {
  const std::string mesh_path = effective_mesh_path();
  const std::string index_path = out("excur/index.json");
  if (!fs::exists(index_path))
    throw DataError("excursion outputs not found (run excur first): " + index_path);

  std::vector<std::string> mask_rels;
  const json excur_index = read_json_file(index_path);
  for (const auto& e : excur_index.at("masks"))
    mask_rels.push_back(e.get<std::string>());

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  inputs[mesh_path] = checksum_file(mesh_path);
  inputs[index_path] = checksum_file(index_path);
  for (const auto& rel : mask_rels) {
    inputs[out(rel)] = checksum_file(out(rel));
    inputs[out(rel + ".json")] = checksum_file(out(rel + ".json"));
  }
  const std::string manifest_path = out("summarize/manifest.json");
  if (stage_done(manifest_path, inputs, "summarize")) return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("summarize"));
  SurfaceMesh mesh = load_mesh(mesh_path);
  MaskedSubmesh sub = masked_submesh(mesh);
  FemMatrices fem = assemble_fem(sub.mesh);

  std::vector<ActivationRecord> records;
  for (const auto& rel : mask_rels) {
    std::vector<bool> full = read_active_mask(out(rel));
    if (full.size() != static_cast<size_t>(mesh.n_vertices()))
      throw DataError(out(rel) + ": mask length != mesh vertices");
    json sidecar = read_json_file(out(rel + ".json"));

    ActivationRecord r;
    r.subject_id = sidecar.at("subject").get<std::string>();
    r.visit_id = sidecar.at("visit").get<std::string>();
    r.method = sidecar.at("method").get<std::string>();
    r.hemisphere = cfg_.hemisphere;
    r.gamma = sidecar.value("gamma", 0.0);
    r.area = activation_area(restrict_to_masked(full, sub), fem.vertex_areas);
    records.push_back(std::move(r));
  }

  write_activation_records(out("summarize/activation_records.tsv"), records);

  ReliabilityReport rep = reliability_stats(records);
  {
    std::ostringstream s;
    s.precision(17);
    s << "subject_id\tmethod\themisphere\tgamma\tn_visits\tmean_area\tsd_area\tcv\n";
    for (const auto& r : rep.subjects) {
      s << r.subject_id << '\t' << r.method << '\t' << r.hemisphere << '\t'
        << r.gamma << '\t' << r.n_visits << '\t' << r.mean_area << '\t';
      if (r.sd_area) s << *r.sd_area; else s << "NA";
      s << '\t';
      if (r.cv) s << *r.cv; else s << "NA";
      s << '\n';
    }
    std::ofstream f(out("summarize/reliability_subjects.tsv"), std::ios::trunc);
    if (!f) throw DataError("cannot write reliability_subjects.tsv");
    f << s.str();
  }
  {
    std::ostringstream s;
    s.precision(17);
    s << "method\themisphere\tgamma\tn_subjects\tbetween_cv\tsd_vs_mean_slope\tsd_vs_mean_intercept\n";
    for (const auto& r : rep.methods) {
      s << r.method << '\t' << r.hemisphere << '\t' << r.gamma << '\t'
        << r.n_subjects << '\t';
      if (r.between_cv) s << *r.between_cv; else s << "NA";
      s << '\t';
      if (r.sd_vs_mean_slope) s << *r.sd_vs_mean_slope; else s << "NA";
      s << '\t';
      if (r.sd_vs_mean_intercept) s << *r.sd_vs_mean_intercept; else s << "NA";
      s << '\n';
    }
    std::ofstream f(out("summarize/reliability_methods.tsv"), std::ios::trunc);
    if (!f) throw DataError("cannot write reliability_methods.tsv");
    f << s.str();
  }

  std::map<std::string, std::string> outputs;
  for (const char* name : {"summarize/activation_records.tsv",
                           "summarize/reliability_subjects.tsv",
                           "summarize/reliability_methods.tsv"})
    outputs[out(name)] = checksum_file(out(name));

  StageManifest m;
  m.stage = "summarize";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("summarize: " + std::to_string(records.size()) + " records in " +
           std::to_string(m.wall_seconds) + "s");
}

// ---------------------------------------------------------------------------
// lmm
// ---------------------------------------------------------------------------

void Pipeline::lmm() {
  const std::string clinical_path = effective_clinical_path();
  const std::string records_path = out("summarize/activation_records.tsv");
  if (!fs::exists(records_path))
    throw DataError("summaries not found (run summarize first): " + records_path);

  std::map<std::string, std::string> inputs;
  inputs["config"] = config_fingerprint();
  inputs[clinical_path] = checksum_file(clinical_path);
  inputs[records_path] = checksum_file(records_path);
  const std::string manifest_path = out("lmm/manifest.json");
  if (stage_done(manifest_path, inputs, "lmm")) return;

  const auto t0 = std::chrono::steady_clock::now();
  ensure_dir(out("lmm"));

  std::vector<ClinicalVisit> visits = read_clinical_tsv(clinical_path);
  WindowRules rules;
  rules.window_days = cfg_.lmm.window_days;
  rules.exclude_subjects.insert(cfg_.lmm.exclude_subjects.begin(),
                                cfg_.lmm.exclude_subjects.end());
  visits = apply_windowing(std::move(visits), rules);

  std::vector<ActivationRecord> records = read_activation_records(records_path);

  // Join bayes-method areas at the configured gamma to the windowed visits.
  std::map<std::pair<std::string, std::string>, double> area_by_visit;
  for (const auto& r : records)
    if (r.method == "bayes" && r.gamma == cfg_.lmm.gamma)
      area_by_visit[{r.subject_id, r.visit_id}] = r.area;

  struct Row {
    std::string subject;
    double area, d_total, d_hand, d_other;
    bool is_als;
  };
  std::vector<Row> rows;
  int n_unmatched = 0;
  for (const auto& v : visits) {
    auto it = area_by_visit.find({v.subject_id, v.visit_id});
    if (it == area_by_visit.end()) {
      ++n_unmatched;
      continue;
    }
    DisabilityScores d = disability_scores(v);
    rows.push_back(Row{v.subject_id, it->second, d.total, d.hand, d.other,
                       v.group == "ALS"});
  }
  if (n_unmatched > 0)
    log_warn("lmm: " + std::to_string(n_unmatched) +
             " clinical visits had no matching activation record");
  if (rows.empty())
    throw DataError("lmm: no joined rows (check visit ids and gamma=" +
                    std::to_string(cfg_.lmm.gamma) + ")");

  auto build_data = [&](bool want_als) {
    ModelData md;
    std::map<std::string, int> subj_ids;
    std::vector<double> resp, dt, dh, dot;
    for (const auto& r : rows) {
      if (r.is_als != want_als) continue;
      if (!subj_ids.count(r.subject)) {
        const int id = static_cast<int>(subj_ids.size());
        subj_ids[r.subject] = id;
      }
      md.subject_index.push_back(subj_ids[r.subject]);
      resp.push_back(r.area);
      dt.push_back(r.d_total);
      dh.push_back(r.d_hand);
      dot.push_back(r.d_other);
    }
    auto to_eig = [](const std::vector<double>& v) {
      return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                               static_cast<Eigen::Index>(v.size()))
          .eval();
    };
    md.response = to_eig(resp);
    md.d_total = to_eig(dt);
    md.d_hand = to_eig(dh);
    md.d_other = to_eig(dot);
    return md;
  };

  json fits_json = json::array();
  json lrt_json = json::array();
  std::map<std::string, std::string> outputs;

  auto record_fit = [&](const ModelFit& mf, const std::string& group) {
    json f;
    f["spec"] = to_string(mf.spec);
    f["group"] = group;
    f["gamma"] = cfg_.lmm.gamma;
    f["n_obs"] = mf.fit.n_obs;
    f["n_subjects"] = mf.fit.n_subjects;
    f["terms"] = mf.fit.term_names;
    f["beta_reml"] = to_vec(mf.fit.reml.fixed_effects);
    Eigen::VectorXd se = mf.fit.reml.fixed_cov.diagonal().cwiseSqrt();
    f["se_reml"] = to_vec(se);
    f["lambda_reml"] = mf.fit.reml.lambda;
    f["random_intercept_var"] = mf.fit.reml.random_intercept_var;
    f["residual_var"] = mf.fit.reml.residual_var;
    f["loglik_ml"] = mf.fit.ml.loglik;
    f["loglik_reml"] = mf.fit.reml.loglik;
    f["aic"] = aic(mf.fit);
    if (mf.design.basis) {
      f["spline_knots"] = {mf.design.basis->knots[0], mf.design.basis->knots[1],
                           mf.design.basis->knots[2], mf.design.basis->knots[3]};
    }
    if (mf.design.dropped_other) f["dropped_other"] = true;
    fits_json.push_back(std::move(f));
  };

  auto write_curve = [&](const ModelFit& mf, const ModelData& data,
                         const std::string& name) {
    const Eigen::VectorXd& pred =
        (mf.spec == LmmSpec::AlsTotalSpline || mf.spec == LmmSpec::AlsTotalLinear)
            ? data.d_total
            : data.d_hand;
    Eigen::VectorXd grid =
        curve_grid(pred, cfg_.lmm.curve_points, cfg_.lmm.curve_upper_quantile);
    std::vector<double> other(data.d_other.data(),
                              data.d_other.data() + data.d_other.size());
    const double held = other.empty() ? 0.0 : sample_quantile(other, 0.5);
    std::vector<CurvePoint> curve = coefficient_curve(mf, grid, held);

    std::ostringstream s;
    s.precision(17);
    s << "x\tmean\tse\textrapolated\n";
    for (const auto& pt : curve)
      s << pt.x << '\t' << pt.mean << '\t' << pt.se << '\t'
        << (pt.extrapolated ? 1 : 0) << '\n';
    const std::string rel = "lmm/curve_" + name + ".tsv";
    std::ofstream f(out(rel), std::ios::trunc);
    if (!f) throw DataError("cannot write " + rel);
    f << s.str();
    f.close();
    outputs[out(rel)] = checksum_file(out(rel));
  };

  // A spline term is only identifiable when its predictor supports the knot
  // placement; small or uniform cohorts fall back to the linear models.
  auto spline_ok = [](const Eigen::VectorXd& x) {
    std::vector<double> xv(x.data(), x.data() + x.size());
    try {
      make_spline_basis(xv);
      return true;
    } catch (const DataError&) {
      return false;
    }
  };

  ModelData als = build_data(true);
  if (als.response.size() > 0) {
    std::set<int> distinct(als.subject_index.begin(), als.subject_index.end());
    if (distinct.size() >= 2) {
      auto fit_pair = [&](LmmSpec lin_spec, LmmSpec spl_spec,
                          const Eigen::VectorXd& pred, const char* pred_name,
                          const char* curve_name) {
        ModelFit lin = fit_model(lin_spec, als);
        record_fit(lin, "ALS");
        if (!spline_ok(pred)) {
          log_warn(std::string("lmm: too few distinct ") + pred_name +
                   " values for spline terms; keeping the linear model only");
          return;
        }
        ModelFit spl = fit_model(spl_spec, als);
        record_fit(spl, "ALS");
        LrtResult lr = lrt(lin.fit, spl.fit);
        lrt_json.push_back({{"null", to_string(lin.spec)},
                            {"alt", to_string(spl.spec)},
                            {"statistic", lr.statistic},
                            {"df", lr.df},
                            {"p_value", lr.p_value}});
        write_curve(spl, als, curve_name);
      };
      fit_pair(LmmSpec::AlsTotalLinear, LmmSpec::AlsTotalSpline, als.d_total,
               "d_total", "als-total-spline");
      fit_pair(LmmSpec::AlsHandOtherLinear, LmmSpec::AlsHandOtherSpline,
               als.d_hand, "d_hand", "als-hand-other-spline");
    } else {
      log_warn("lmm: fewer than 2 ALS subjects; skipping ALS models");
    }
  }

  ModelData hc = build_data(false);
  if (hc.response.size() > 0) {
    std::set<int> distinct(hc.subject_index.begin(), hc.subject_index.end());
    if (distinct.size() >= 2) {
      ModelFit hc_fit = fit_model(LmmSpec::HcIntercept, hc);
      record_fit(hc_fit, "HC");
    } else {
      log_warn("lmm: fewer than 2 HC subjects; skipping HC model");
    }
  }

  write_json_file(out("lmm/model_fits.json"),
                  json{{"fits", fits_json}, {"lrt", lrt_json}});
  outputs[out("lmm/model_fits.json")] = checksum_file(out("lmm/model_fits.json"));

  StageManifest m;
  m.stage = "lmm";
  m.version = kPipelineVersion;
  m.seed = cfg_.seed;
  m.wall_seconds = seconds_since(t0);
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(manifest_path, m);
  log_info("lmm: " + std::to_string(fits_json.size()) + " model fits in " +
           std::to_string(m.wall_seconds) + "s");
}

void Pipeline::all() {
  if (cfg_.simulate) simulate();
  prep();
  fit();
  excur();
  summarize();
  if (fs::exists(effective_clinical_path())) {
    lmm();
  } else {
    log_info("all: no clinical table; skipping mixed models");
  }
}

}  // namespace surfglm
