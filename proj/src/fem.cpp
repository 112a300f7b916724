#include "surfglm/fem.hpp"

#include <vector>

#include "surfglm/errors.hpp"

namespace surfglm {

FemMatrices assemble_fem(const SurfaceMesh& mesh) {
  mesh.validate();
  MaskedSubmesh sub = masked_submesh(mesh);
  const SurfaceMesh& m = sub.mesh;
  const int V = m.n_vertices();
  if (V == 0) throw DataError("assemble_fem: mask selects no vertices");

  FemMatrices fem;
  fem.mass = Eigen::VectorXd::Zero(V);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(m.n_triangles()) * 9);

  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[static_cast<std::size_t>(t)];
    const Eigen::Vector3d p0 = m.vertices.row(tri[0]);
    const Eigen::Vector3d p1 = m.vertices.row(tri[1]);
    const Eigen::Vector3d p2 = m.vertices.row(tri[2]);
    const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();

    // Gradients of the linear basis functions are in-plane, so the element
    // stiffness reduces to dot products of the opposite edge vectors.
    const std::array<Eigen::Vector3d, 3> edge = {
        Eigen::Vector3d(p2 - p1), Eigen::Vector3d(p0 - p2), Eigen::Vector3d(p1 - p0)};
    for (int i = 0; i < 3; ++i) {
      fem.mass[tri[static_cast<std::size_t>(i)]] += area / 3.0;
      for (int j = 0; j < 3; ++j) {
        const double kij =
            edge[static_cast<std::size_t>(i)].dot(edge[static_cast<std::size_t>(j)]) /
            (4.0 * area);
        trips.emplace_back(tri[static_cast<std::size_t>(i)],
                           tri[static_cast<std::size_t>(j)], kij);
      }
    }
  }

  fem.stiffness.resize(V, V);
  fem.stiffness.setFromTriplets(trips.begin(), trips.end());
  fem.stiffness.makeCompressed();
  fem.vertex_areas = fem.mass;

  for (int v = 0; v < V; ++v) {
    if (!(fem.mass[v] > 0.0))
      throw DataError("assemble_fem: masked vertex " + std::to_string(sub.to_full[static_cast<std::size_t>(v)]) +
                      " has no incident masked triangle (zero lumped mass)");
  }
  return fem;
}

SpdePrecision spde_precision(const FemMatrices& fem, double kappa, double tau) {
  return SpdePrecisionBuilder(fem).build(kappa, tau);
}

SpdePrecisionBuilder::SpdePrecisionBuilder(const FemMatrices& fem)
    : mass_(fem.mass), stiffness_(fem.stiffness) {
  const int V = fem.n_vertices();
  SparseMat cinv_g(V, V);
  cinv_g = mass_.cwiseInverse().asDiagonal() * stiffness_;
  gcg_ = (stiffness_ * cinv_g).pruned();
  gcg_.makeCompressed();
}

SpdePrecision SpdePrecisionBuilder::build(double kappa, double tau) const {
  if (!(kappa > 0.0) || !(tau > 0.0))
    throw ConfigError("spde_precision requires kappa > 0 and tau > 0, got kappa=" +
                      std::to_string(kappa) + " tau=" + std::to_string(tau));
  const int V = static_cast<int>(mass_.size());
  const double k2 = kappa * kappa;
  SparseMat cterm(V, V);
  cterm = mass_.asDiagonal();
  SpdePrecision out;
  out.Q = tau * (k2 * k2 * cterm + 2.0 * k2 * stiffness_ + gcg_);
  out.Q.makeCompressed();
  out.kappa = kappa;
  out.tau = tau;
  return out;
}

}  // namespace surfglm
