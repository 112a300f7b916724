#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "surfglm/errors.hpp"
#include "surfglm/rng.hpp"

namespace surfglm {

/// Sparse LDL^T factorization of a symmetric positive definite matrix with
/// AMD fill-reducing ordering. The symbolic analysis can be reused across
/// refactorizations with the same sparsity pattern, which is how the
/// hyperparameter optimizer amortizes its many likelihood evaluations.
class SparseChol {
public:
  using Sp = Eigen::SparseMatrix<double>;

  void analyze(const Sp& A) {
    solver_.analyzePattern(A);
    analyzed_ = true;
    ok_ = false;
  }

  /// Numeric factorization; runs the symbolic analysis first if needed.
  /// Throws NumericalError if the matrix is not positive definite.
  void factorize(const Sp& A) {
    if (!analyzed_) analyze(A);
    solver_.factorize(A);
    if (solver_.info() != Eigen::Success)
      throw NumericalError("sparse Cholesky factorization failed (matrix not SPD?)");
    const auto& D = solver_.vectorD();
    for (Eigen::Index i = 0; i < D.size(); ++i)
      if (!(D[i] > 0.0))
        throw NumericalError("sparse Cholesky: non-positive pivot at index " +
                             std::to_string(i) + " (matrix not positive definite)");
    ok_ = true;
  }

  bool factorized() const { return ok_; }

  double log_det() const {
    require_ok();
    return solver_.vectorD().array().log().sum();
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    require_ok();
    return solver_.solve(b);
  }

  /// Quadratic form b^T A^{-1} b.
  double inv_quad(const Eigen::VectorXd& b) const { return b.dot(solve(b)); }

  /// Draw from N(mu, A^{-1}) by back-substitution on a standard normal
  /// vector: with P A P^T = L D L^T, the draw is mu + P^T L^{-T} D^{-1/2} z.
  Eigen::VectorXd sample(const Eigen::VectorXd& mu, rng::Engine& eng) const {
    require_ok();
    const Eigen::Index n = mu.size();
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = eng.normal();
    return mu + unwhiten(z);
  }

  /// Maps a standard normal vector to a zero-mean draw with covariance
  /// A^{-1} (the sampling back-substitution without the mean shift).
  Eigen::VectorXd unwhiten(const Eigen::VectorXd& z) const {
    require_ok();
    Eigen::VectorXd y = z.cwiseQuotient(solver_.vectorD().cwiseSqrt());
    solver_.matrixU().solveInPlace(y);
    return solver_.permutationPinv() * y;
  }

private:
  void require_ok() const {
    if (!ok_) throw NumericalError("SparseChol used before successful factorization");
  }

  Eigen::SimplicialLDLT<Sp> solver_;
  bool analyzed_ = false;
  bool ok_ = false;
};

}  // namespace surfglm
