#include <doctest.h>

#include <Eigen/Dense>
#include <fstream>

#include "helpers.hpp"
#include "surfglm/chol.hpp"
#include "surfglm/errors.hpp"
#include "surfglm/fem.hpp"
#include "surfglm/mesh.hpp"
#include "surfglm/synth.hpp"

using namespace surfglm;

namespace {

SurfaceMesh unit_right_triangle() {
  SurfaceMesh m;
  m.vertices.resize(3, 3);
  m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  m.triangles = {{0, 1, 2}};
  m.mask = {true, true, true};
  return m;
}

}  // namespace

TEST_CASE("smallest valid mesh passes validation") {
  SurfaceMesh m = unit_right_triangle();
  CHECK_NOTHROW(m.validate());
  CHECK(m.n_vertices() == 3);
  CHECK(m.n_triangles() == 1);
  CHECK(m.triangle_area(0) == doctest::Approx(0.5));
}

TEST_CASE("out-of-range triangle index is rejected with its location") {
  SurfaceMesh m = unit_right_triangle();
  m.triangles.push_back({0, 1, 5});
  CHECK_THROWS_AS(m.validate(), DataError);
  try {
    m.validate();
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);  // face index
  }
}

TEST_CASE("degenerate triangle is rejected") {
  SurfaceMesh m = unit_right_triangle();
  m.vertices.row(2) = m.vertices.row(1);  // collapses the only face
  CHECK_THROWS_AS(m.validate(), DataError);
}

TEST_CASE("an edge shared by three faces is rejected") {
  SurfaceMesh m;
  m.vertices.resize(5, 3);
  m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0, -1, -1, 1;
  m.triangles = {{0, 1, 2}, {1, 3, 2}, {0, 1, 4}};
  m.triangles.push_back({0, 4, 3});
  // Edge (0,1) appears in faces 0, 2 and the one below.
  m.triangles.push_back({1, 0, 3});
  m.mask.assign(5, true);
  CHECK_THROWS_AS(m.validate(), DataError);
}

TEST_CASE("mesh file round-trips bit-exactly") {
  testutil::TempDir tmp;
  SurfaceMesh m = curved_patch_mesh(7, 5, 1.25);
  m.mask[3] = false;
  m.mask[9] = false;
  const std::string path = tmp.file("mesh.txt");
  save_mesh(m, path);
  SurfaceMesh back = load_mesh(path);
  REQUIRE(back.n_vertices() == m.n_vertices());
  CHECK(back.vertices == m.vertices);  // exact: round-trip via max-precision text
  CHECK(back.triangles == m.triangles);
  CHECK(back.mask == m.mask);
  CHECK(mesh_checksum(back) == mesh_checksum(m));

  // Re-saving the loaded mesh reproduces the identical file.
  const std::string path2 = tmp.file("mesh2.txt");
  save_mesh(back, path2);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("malformed mesh files are rejected") {
  testutil::TempDir tmp;
  const std::string path = tmp.file("bad.txt");
  {
    std::ofstream f(path);
    f << "3 1\n0 0 0\n1 0 0\n0 1 0\n0 1 5\n";  // face index out of range
  }
  CHECK_THROWS_AS(load_mesh(path), DataError);
  {
    std::ofstream f(path);
    f << "3 1\n0 0 0\n1 0 0\n";  // truncated vertex list
  }
  CHECK_THROWS_AS(load_mesh(path), DataError);
  CHECK_THROWS_AS(load_mesh(tmp.file("missing.txt")), DataError);
}

TEST_CASE("masked submesh keeps only fully masked faces and maps back") {
  SurfaceMesh m = grid_mesh(4, 4);
  m.mask[0] = false;
  m.mask[5] = false;
  MaskedSubmesh sub = masked_submesh(m);
  CHECK(sub.mesh.n_vertices() == 14);
  for (int v = 0; v < sub.mesh.n_vertices(); ++v) {
    const int full = sub.to_full[static_cast<size_t>(v)];
    CHECK(m.mask[static_cast<size_t>(full)]);
    CHECK(sub.from_full[static_cast<size_t>(full)] == v);
    CHECK(sub.mesh.vertices.row(v) == m.vertices.row(full));
  }
  CHECK(sub.from_full[0] == -1);
  CHECK(sub.from_full[5] == -1);
  for (const auto& tri : sub.mesh.triangles)
    for (int c = 0; c < 3; ++c) CHECK(tri[c] < sub.mesh.n_vertices());
}

TEST_CASE("FEM matrices on the unit right triangle match hand assembly") {
  FemMatrices fem = assemble_fem(unit_right_triangle());
  REQUIRE(fem.n_vertices() == 3);
  CHECK(fem.mass[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(fem.mass[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(fem.mass[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  Eigen::MatrixXd G_expect(3, 3);
  G_expect << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  G_expect *= 0.5;
  const Eigen::MatrixXd G = Eigen::MatrixXd(fem.stiffness);
  CHECK((G - G_expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stiffness rows sum to zero and mass conserves area") {
  for (const SurfaceMesh& m : {grid_mesh(6, 5, 0.8), curved_patch_mesh(6, 6)}) {
    FemMatrices fem = assemble_fem(m);
    const Eigen::MatrixXd G = Eigen::MatrixXd(fem.stiffness);
    CHECK(G.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    double area = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) area += m.triangle_area(t);
    CHECK(fem.vertex_areas.sum() == doctest::Approx(area).epsilon(1e-12));
    CHECK(fem.vertex_areas == fem.mass);
    CHECK(fem.mass.minCoeff() > 0.0);
  }
}

TEST_CASE("two-triangle unit square has total area 1") {
  FemMatrices fem = assemble_fem(grid_mesh(2, 2, 1.0));
  CHECK(fem.vertex_areas.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("FEM assembly matches the independent dense assembler") {
  SurfaceMesh m = curved_patch_mesh(8, 7, 0.9);
  FemMatrices fem = assemble_fem(m);
  testutil::DenseFem dense = testutil::dense_fem(m);
  CHECK((Eigen::MatrixXd(fem.stiffness) - dense.G).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fem.mass - dense.C.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("FEM assembly requires a nonempty mask") {
  SurfaceMesh m = grid_mesh(3, 3);
  m.mask.assign(m.mask.size(), false);
  CHECK_THROWS_AS(assemble_fem(m), DataError);
}

TEST_CASE("SPDE precision equals the dense formula") {
  SurfaceMesh m = curved_patch_mesh(7, 6);
  FemMatrices fem = assemble_fem(m);
  testutil::DenseFem dense = testutil::dense_fem(m);
  for (const auto& [kappa, tau] : {std::pair{1.0, 1.0}, {0.3, 5.0}, {4.0, 0.01}}) {
    SpdePrecision sp = spde_precision(fem, kappa, tau);
    CHECK(sp.kappa == kappa);
    CHECK(sp.tau == tau);
    const Eigen::MatrixXd Q = Eigen::MatrixXd(sp.Q);
    const Eigen::MatrixXd Q_dense = testutil::dense_spde(dense, kappa, tau);
    const double scale = Q_dense.cwiseAbs().maxCoeff();
    CHECK((Q - Q_dense).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("SPDE precision scales linearly in tau") {
  FemMatrices fem = assemble_fem(grid_mesh(5, 5));
  const Eigen::MatrixXd Q1 = Eigen::MatrixXd(spde_precision(fem, 1.3, 1.0).Q);
  const Eigen::MatrixXd Q2 = Eigen::MatrixXd(spde_precision(fem, 1.3, 2.0).Q);
  CHECK((Q2 - 2.0 * Q1).cwiseAbs().maxCoeff() < 1e-12 * Q2.cwiseAbs().maxCoeff());
}

TEST_CASE("large kappa makes the mass term dominate") {
  FemMatrices fem = assemble_fem(grid_mesh(5, 4));
  const double kappa = 1e4, tau = 1.0;
  Eigen::MatrixXd Q = Eigen::MatrixXd(spde_precision(fem, kappa, tau).Q);
  Q /= tau * std::pow(kappa, 4);
  const Eigen::MatrixXd C = Eigen::MatrixXd(fem.mass.asDiagonal());
  CHECK((Q - C).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("SPDE precision rejects non-positive parameters") {
  FemMatrices fem = assemble_fem(grid_mesh(3, 3));
  CHECK_THROWS_AS(spde_precision(fem, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(spde_precision(fem, 1.0, -2.0), ConfigError);
}

TEST_CASE("SPDE Cholesky succeeds across the parameter range") {
  FemMatrices fem = assemble_fem(curved_patch_mesh(8, 8));
  for (double kappa : {1e-3, 1.0, 1e3})
    for (double tau : {1e-6, 1.0, 1e6}) {
      SparseChol chol;
      CHECK_NOTHROW(chol.factorize(spde_precision(fem, kappa, tau).Q));
    }
}

TEST_CASE("sparse Cholesky matches dense log-determinant, solves and covariance") {
  FemMatrices fem = assemble_fem(grid_mesh(5, 5));
  SpdePrecision sp = spde_precision(fem, 0.8, 2.5);
  const Eigen::MatrixXd Q = Eigen::MatrixXd(sp.Q);
  const int n = static_cast<int>(Q.rows());

  SparseChol chol;
  chol.factorize(sp.Q);

  const Eigen::LLT<Eigen::MatrixXd> llt(Q);
  const double logdet_dense =
      2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  CHECK(chol.log_det() == doctest::Approx(logdet_dense).epsilon(1e-10));

  rng::Engine eng(99);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = eng.normal();
  const Eigen::VectorXd x_dense = llt.solve(b);
  CHECK((chol.solve(b) - x_dense).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(chol.inv_quad(b) == doctest::Approx(b.dot(x_dense)).epsilon(1e-10));

  // The unwhitening map M satisfies M M^T = Q^{-1} exactly; build M by
  // unwhitening the standard basis.
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    M.col(i) = chol.unwhiten(Eigen::VectorXd::Unit(n, i));
  const Eigen::MatrixXd Qinv = Q.inverse();
  CHECK((M * M.transpose() - Qinv).cwiseAbs().maxCoeff() <
        1e-8 * Qinv.cwiseAbs().maxCoeff());
}

TEST_CASE("Cholesky of an indefinite matrix throws") {
  SparseMat A(2, 2);
  A.insert(0, 0) = 1.0;
  A.insert(1, 1) = -1.0;
  A.makeCompressed();
  SparseChol chol;
  CHECK_THROWS_AS(chol.factorize(A), NumericalError);
  CHECK_THROWS_AS(chol.log_det(), NumericalError);  // not factorized
}
