#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace surfglm {

/// Triangulated cortical surface patch with an optional per-vertex analysis
/// mask. Coordinates are in millimeters. Immutable after construction.
struct SurfaceMesh {
  Eigen::MatrixXd vertices;             // V x 3
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> mask;               // analysis mask, size V

  int n_vertices() const { return static_cast<int>(vertices.rows()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_masked() const;

  double triangle_area(int t) const;

  /// Checks index ranges, degenerate triangles (area < 1e-12 mm^2) and the
  /// 2-manifold condition (each edge in at most two triangles). Throws
  /// DataError with the offending record on violation.
  void validate() const;
};

/// The induced mesh on masked vertices, together with the mapping back to
/// the original vertex numbering. Triangles are kept only when all three
/// corners are masked.
struct MaskedSubmesh {
  SurfaceMesh mesh;                 // mask all-true
  std::vector<int> to_full;         // submesh vertex -> full-mesh vertex
  std::vector<int> from_full;       // full-mesh vertex -> submesh vertex or -1
};

MaskedSubmesh masked_submesh(const SurfaceMesh& mesh);

/// Plain-text mesh format: line 1 "V F"; then V lines "x y z [mask01]";
/// then F lines "i j k" with zero-based indices. '#' starts a comment.
SurfaceMesh load_mesh(const std::string& path);
void save_mesh(const SurfaceMesh& mesh, const std::string& path);

/// Checksum of the mesh contents (not the file bytes): vertex coordinates,
/// triangle indices and mask, in canonical order. Used to tie fits and maps
/// to the mesh they were computed on.
std::uint64_t mesh_checksum(const SurfaceMesh& mesh);

}  // namespace surfglm
