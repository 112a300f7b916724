#include "surfglm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "surfglm/chol.hpp"
#include "surfglm/errors.hpp"

namespace surfglm {

SurfaceMesh grid_mesh(int nx, int ny, double spacing) {
  if (nx < 2 || ny < 2) throw ConfigError("grid_mesh: need at least 2x2 vertices");
  SurfaceMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(nx) * ny, 3);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index v = static_cast<Eigen::Index>(j) * nx + i;
      mesh.vertices(v, 0) = i * spacing;
      mesh.vertices(v, 1) = j * spacing;
      mesh.vertices(v, 2) = 0.0;
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i;
      const int b = j * nx + i + 1;
      const int c = (j + 1) * nx + i;
      const int d = (j + 1) * nx + i + 1;
      mesh.triangles.push_back({a, b, d});
      mesh.triangles.push_back({a, d, c});
    }
  mesh.mask.assign(static_cast<size_t>(mesh.vertices.rows()), true);
  mesh.validate();
  return mesh;
}

SurfaceMesh curved_patch_mesh(int nx, int ny, double spacing, double bump_height) {
  SurfaceMesh mesh = grid_mesh(nx, ny, spacing);
  const double cx = 0.5 * spacing * (nx - 1);
  const double cy = 0.5 * spacing * (ny - 1);
  const double extent = std::max(cx, cy);
  const double s = std::max(extent / 2.0, 1e-9);
  for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
    const double dx = mesh.vertices(v, 0) - cx;
    const double dy = mesh.vertices(v, 1) - cy;
    mesh.vertices(v, 2) =
        bump_height * extent * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
  }
  mesh.validate();
  return mesh;
}

Eigen::VectorXd sample_gmrf(const SparseMat& Q, rng::Engine& eng) {
  SparseChol chol;
  chol.factorize(Q);
  Eigen::VectorXd z(Q.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = eng.normal();
  return chol.unwhiten(z);
}

namespace {

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SynthStudy generate_study(const SynthStudyConfig& cfg) {
  if (cfg.n_subjects < 1 || cfg.n_visits < 1)
    throw ConfigError("generate_study: need at least one subject and visit");
  cfg.schedule.validate();

  SynthStudy study;
  study.submesh = masked_submesh(cfg.mesh);
  const int V = study.submesh.mesh.n_vertices();
  const int K = cfg.theta.n_tasks();
  if (K < 1) throw ConfigError("generate_study: hyperparameters define no tasks");

  study.X_task = build_task_regressors(cfg.schedule, cfg.hrf);
  if (study.X_task.cols() != K)
    throw ConfigError("generate_study: task count mismatch (design has " +
                      std::to_string(study.X_task.cols()) + ", theta has " +
                      std::to_string(K) + ")");
  const int T = static_cast<int>(study.X_task.rows());

  // Precompute the injected truth template on the masked vertices.
  Eigen::VectorXd inject = Eigen::VectorXd::Zero(V);
  if (cfg.injection) {
    const auto& inj = *cfg.injection;
    if (!inj.visit_scale.empty() &&
        static_cast<int>(inj.visit_scale.size()) != cfg.n_visits)
      throw ConfigError("generate_study: visit_scale length != n_visits");
    int n_inside = 0;
    for (int v = 0; v < V; ++v) {
      const double dx = study.submesh.mesh.vertices(v, 0) - inj.center_x;
      const double dy = study.submesh.mesh.vertices(v, 1) - inj.center_y;
      if (dx * dx + dy * dy <= inj.radius * inj.radius) {
        inject[v] = inj.amplitude;
        ++n_inside;
      }
    }
    if (n_inside == 0)
      throw ConfigError("generate_study: injection region contains no masked vertices");
  }

  FemMatrices fem = assemble_fem(study.submesh.mesh);
  SpdePrecisionBuilder builder(fem);
  std::vector<SparseMat> Q(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k)
    Q[static_cast<size_t>(k)] = builder.build(cfg.theta.kappa[k], cfg.theta.tau[k]).Q;

  const double noise_sd = std::sqrt(cfg.theta.sigma2);
  for (int s = 0; s < cfg.n_subjects; ++s) {
    const std::string subject_id = "S" + zero_pad(s + 1, 3);

    // Subject-level fields, shared across visits when requested.
    Eigen::MatrixXd beta_subject = Eigen::MatrixXd::Zero(V, K);
    if (cfg.sample_fields_from_prior && cfg.per_subject_constant_fields) {
      rng::Engine eng(rng::derive_seed(cfg.seed, {1, std::uint64_t(s)}));
      for (int k = 0; k < K; ++k)
        beta_subject.col(k) = sample_gmrf(Q[static_cast<size_t>(k)], eng);
    }

    for (int j = 0; j < cfg.n_visits; ++j) {
      const std::string visit_id = "V" + zero_pad(j + 1, 2);
      rng::Engine eng(
          rng::derive_seed(cfg.seed, {2, std::uint64_t(s), std::uint64_t(j)}));

      Eigen::MatrixXd beta = beta_subject;
      if (cfg.sample_fields_from_prior && !cfg.per_subject_constant_fields)
        for (int k = 0; k < K; ++k)
          beta.col(k) = sample_gmrf(Q[static_cast<size_t>(k)], eng);
      if (cfg.injection) {
        const double scale = cfg.injection->visit_scale.empty()
                                 ? 1.0
                                 : cfg.injection->visit_scale[static_cast<size_t>(j)];
        beta.col(0) += scale * inject;
      }

      Eigen::MatrixXd signal = study.X_task * beta.transpose();  // T x V
      for (Eigen::Index t = 0; t < T; ++t)
        for (int v = 0; v < V; ++v) signal(t, v) += noise_sd * eng.normal();

      SessionTruth truth;
      truth.subject_id = subject_id;
      truth.visit_id = visit_id;
      truth.beta = beta;

      if (cfg.spikes.n_spikes > 0) {
        if (cfg.spikes.n_spikes >= T)
          throw ConfigError("generate_study: more spikes than volumes");
        const double clean_sd =
            std::sqrt(signal.array().square().mean() -
                      std::pow(signal.array().mean(), 2.0));
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < cfg.spikes.n_spikes)
          chosen.insert(static_cast<int>(eng.below(std::uint64_t(T))));
        for (int t : chosen) {
          signal.row(t).array() += cfg.spikes.magnitude * clean_sd;
          truth.spike_volumes.push_back(t);
        }
      }

      SynthSession sess;
      sess.subject_id = subject_id;
      sess.visit_id = visit_id;
      if (cfg.raw_mode) {
        if (cfg.baseline_mean <= 0.0)
          throw ConfigError("generate_study: baseline mean must be positive");
        sess.Y = cfg.baseline_mean * (1.0 + signal.array() / 100.0);
      } else {
        sess.Y = std::move(signal);
      }
      study.sessions.push_back(std::move(sess));
      study.truth.push_back(std::move(truth));
    }
  }
  return study;
}

}  // namespace surfglm
