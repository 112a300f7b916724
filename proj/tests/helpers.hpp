#pragma once

// Shared fixtures and independent dense oracles for the test suite. The
// oracles deliberately re-derive results from definitions (dense linear
// algebra, direct formulas) rather than calling back into the library paths
// they are meant to check.

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "surfglm/bayes.hpp"
#include "surfglm/fem.hpp"
#include "surfglm/mesh.hpp"
#include "surfglm/prep.hpp"
#include "surfglm/rng.hpp"
#include "surfglm/synth.hpp"

namespace testutil {

/// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "surfglm_test_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Dense FEM assembly written independently of the library: per-triangle
/// linear-basis element matrices summed into dense C (lumped) and G.
struct DenseFem {
  Eigen::MatrixXd C;  // diagonal lumped mass
  Eigen::MatrixXd G;
};

inline DenseFem dense_fem(const surfglm::SurfaceMesh& mesh) {
  const int V = mesh.n_vertices();
  DenseFem out;
  out.C = Eigen::MatrixXd::Zero(V, V);
  out.G = Eigen::MatrixXd::Zero(V, V);
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d p[3] = {mesh.vertices.row(tri[0]),
                                  mesh.vertices.row(tri[1]),
                                  mesh.vertices.row(tri[2])};
    const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    // Lumped mass: a third of the triangle area to each corner.
    for (int c = 0; c < 3; ++c) out.C(tri[c], tri[c]) += area / 3.0;
    // Stiffness via the cotangent formula: the edge opposite corner c gets
    // -cot(angle at c)/2 off-diagonal, balanced on the diagonal.
    for (int c = 0; c < 3; ++c) {
      const int i = tri[(c + 1) % 3];
      const int j = tri[(c + 2) % 3];
      const Eigen::Vector3d u = p[(c + 1) % 3] - p[c];
      const Eigen::Vector3d w = p[(c + 2) % 3] - p[c];
      const double cot = u.dot(w) / u.cross(w).norm();
      out.G(i, j) += -0.5 * cot;
      out.G(j, i) += -0.5 * cot;
      out.G(i, i) += 0.5 * cot;
      out.G(j, j) += 0.5 * cot;
    }
  }
  return out;
}

/// Dense SPDE precision directly from the formula.
inline Eigen::MatrixXd dense_spde(const DenseFem& fem, double kappa, double tau) {
  const Eigen::MatrixXd Cinv =
      fem.C.diagonal().cwiseInverse().asDiagonal().toDenseMatrix();
  return tau * (std::pow(kappa, 4) * fem.C + 2.0 * kappa * kappa * fem.G +
                fem.G * Cinv * fem.G);
}

/// Stacked design Z mapping task-major coefficients b = [beta_1; ...;
/// beta_K] (each length V) to the column-major stacked data vec(Y)
/// (vertex-major blocks of length T).
inline Eigen::MatrixXd dense_design(const Eigen::MatrixXd& X, int V) {
  const int T = static_cast<int>(X.rows());
  const int K = static_cast<int>(X.cols());
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(T * V, K * V);
  for (int v = 0; v < V; ++v)
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < K; ++k) Z(v * T + t, k * V + v) = X(t, k);
  return Z;
}

/// Exact log N(y; 0, Sigma) evaluated densely.
inline double dense_gaussian_logpdf(const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& Sigma) {
  const Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense oracle: covariance not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  const double quad = y.dot(llt.solve(y));
  const double n = static_cast<double>(y.size());
  return -0.5 * (n * std::log(2.0 * M_PI) + logdet + quad);
}

/// One model-space session: Y = X beta^T + noise, built directly (no raw-BOLD
/// transform, no preparation steps). beta columns are per-task fields.
struct DirectSession {
  surfglm::SessionData data;
  Eigen::MatrixXd beta;  // V x K truth
};

inline DirectSession direct_session(const Eigen::MatrixXd& X,
                                    const Eigen::MatrixXd& beta, double sigma2,
                                    surfglm::rng::Engine& eng,
                                    const std::string& subject = "S000",
                                    const std::string& visit = "V00") {
  const int T = static_cast<int>(X.rows());
  const int V = static_cast<int>(beta.rows());
  DirectSession out;
  out.beta = beta;
  out.data.Y = X * beta.transpose();
  const double sd = std::sqrt(sigma2);
  for (int v = 0; v < V; ++v)
    for (int t = 0; t < T; ++t) out.data.Y(t, v) += sd * eng.normal();
  out.data.X_task = X;
  out.data.N_nuisance.resize(T, 0);
  out.data.keep_flags.assign(static_cast<size_t>(T), true);
  out.data.subject_id = subject;
  out.data.visit_id = visit;
  out.data.n_projected = 0;
  out.data.residualized = true;
  out.data.dhrf_correlation = surfglm::task_column_correlation(X);
  return out;
}

/// Default two-column task design from a block schedule (K = 2).
inline Eigen::MatrixXd block_design(int T, double TR = 2.0,
                                    double block_s = 20.0, double gap_s = 20.0) {
  surfglm::StimulusSchedule sched;
  sched.TR = TR;
  sched.n_volumes = T;
  const double scan = T * TR;
  for (double onset = gap_s; onset + block_s < scan - TR; onset += block_s + gap_s) {
    sched.onsets.push_back(onset);
    sched.durations.push_back(block_s);
  }
  return surfglm::build_task_regressors(sched);
}

/// Median of a vector (midpoint for even length); small helper for tests.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n == 0) throw std::runtime_error("median of empty vector");
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testutil
