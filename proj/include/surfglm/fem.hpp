#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "surfglm/mesh.hpp"

namespace surfglm {

using SparseMat = Eigen::SparseMatrix<double>;

/// Linear-basis finite element matrices on the masked submesh.
///
/// C is the lumped (diagonal) mass matrix in mm^2: C_vv is one third of the
/// total area of triangles incident to v. G is the sparse symmetric
/// stiffness matrix; each row sums to zero. vertex_areas equals diag(C) and
/// sums to the total area of the masked patch.
struct FemMatrices {
  Eigen::VectorXd mass;        // diag(C), strictly positive
  SparseMat stiffness;         // G
  Eigen::VectorXd vertex_areas;

  int n_vertices() const { return static_cast<int>(mass.size()); }
};

/// Assembles C and G by exact per-triangle summation of linear-basis
/// element matrices, on the masked submesh of `mesh`. Throws DataError on
/// an empty mask or a non-manifold mesh.
FemMatrices assemble_fem(const SurfaceMesh& mesh);

/// SPDE precision Q = tau * (kappa^4 C + 2 kappa^2 G + G C^{-1} G).
/// kappa controls the spatial correlation range, tau the field variance.
struct SpdePrecision {
  SparseMat Q;
  double kappa = 0.0;
  double tau = 0.0;
};

SpdePrecision spde_precision(const FemMatrices& fem, double kappa, double tau);

/// Precomputes G C^{-1} G so repeated precision builds (one per optimizer
/// step) are a sparse linear combination of three fixed-pattern matrices.
class SpdePrecisionBuilder {
public:
  explicit SpdePrecisionBuilder(const FemMatrices& fem);

  SpdePrecision build(double kappa, double tau) const;

  const SparseMat& two_hop() const { return gcg_; }

private:
  Eigen::VectorXd mass_;
  SparseMat stiffness_;
  SparseMat gcg_;  // G C^{-1} G
};

}  // namespace surfglm
