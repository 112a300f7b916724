#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "helpers.hpp"
#include "surfglm/errors.hpp"
#include "surfglm/lmm.hpp"
#include "surfglm/rng.hpp"

using namespace surfglm;

namespace {

struct Fixture {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<int> group;
};

/// Balanced one-way layout: m subjects, n visits each, y = mu + b_i + e.
Fixture balanced_oneway(int m, int n, double mu, double sigma_b, double sigma,
                        std::uint64_t seed) {
  rng::Engine eng(seed);
  Fixture f;
  f.X = Eigen::MatrixXd::Ones(m * n, 1);
  f.y.resize(m * n);
  for (int i = 0; i < m; ++i) {
    const double bi = sigma_b * eng.normal();
    for (int j = 0; j < n; ++j) {
      f.y[i * n + j] = mu + bi + sigma * eng.normal();
      f.group.push_back(i);
    }
  }
  return f;
}

Fixture slope_fixture(int m, int n, double intercept, double slope,
                      double sigma_b, double sigma, std::uint64_t seed) {
  rng::Engine eng(seed);
  Fixture f;
  f.X.resize(m * n, 2);
  f.y.resize(m * n);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    const double bi = sigma_b * eng.normal();
    for (int j = 0; j < n; ++j, ++r) {
      const double x = double(j) + 0.3 * eng.normal();
      f.X(r, 0) = 1.0;
      f.X(r, 1) = x;
      f.y[r] = intercept + slope * x + bi + sigma * eng.normal();
      f.group.push_back(i);
    }
  }
  return f;
}

/// Group-indicator matrix Z (N x m).
Eigen::MatrixXd indicator(const std::vector<int>& group, int m) {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(group.size(), m);
  for (size_t r = 0; r < group.size(); ++r) Z(static_cast<int>(r), group[r]) = 1.0;
  return Z;
}

/// Dense evaluation of the profiled ML / REML log-likelihood at lambda,
/// straight from the marginal-covariance definitions.
double dense_profile_loglik(const Fixture& f, int m, double lambda, bool reml) {
  const int N = static_cast<int>(f.y.size());
  const int p = static_cast<int>(f.X.cols());
  const Eigen::MatrixXd Z = indicator(f.group, m);
  const Eigen::MatrixXd V0 =
      Eigen::MatrixXd::Identity(N, N) + lambda * Z * Z.transpose();
  const Eigen::MatrixXd W = V0.inverse();
  const Eigen::MatrixXd XtWX = f.X.transpose() * W * f.X;
  const Eigen::VectorXd beta = XtWX.ldlt().solve(f.X.transpose() * W * f.y);
  const Eigen::VectorXd r = f.y - f.X * beta;
  const double rss = r.dot(W * r);
  const double logdet_v = std::log(V0.determinant());
  const double log2pi = std::log(2.0 * M_PI);
  if (!reml) {
    const double s2 = rss / N;
    return -0.5 * (N * (log2pi + std::log(s2)) + logdet_v + rss / s2);
  }
  const double s2 = rss / double(N - p);
  const double logdet_i = std::log(XtWX.determinant());
  return -0.5 * ((N - p) * (log2pi + std::log(s2)) + logdet_v + logdet_i +
                 rss / s2);
}

}  // namespace

TEST_CASE("lambda = 0 reduces exactly to ordinary least squares") {
  Fixture f = slope_fixture(5, 4, 1.0, 0.5, 0.0, 0.8, 2);
  LmmSolution sol = solve_at_lambda(f.X, f.y, f.group, 0.0, false);

  const Eigen::VectorXd ols =
      (f.X.transpose() * f.X).ldlt().solve(f.X.transpose() * f.y);
  CHECK((sol.fixed_effects - ols).cwiseAbs().maxCoeff() < 1e-8);
  const double rss = (f.y - f.X * ols).squaredNorm();
  const int N = static_cast<int>(f.y.size());
  CHECK(sol.residual_var == doctest::Approx(rss / N).epsilon(1e-10));
  CHECK(sol.random_intercept_var == 0.0);
  const double expect =
      -0.5 * (N * (std::log(2.0 * M_PI) + std::log(rss / N)) + N);
  CHECK(sol.loglik == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("profiled likelihoods match a dense oracle across lambda") {
  Fixture f = slope_fixture(6, 3, 0.5, -0.7, 1.2, 0.6, 7);
  for (double lambda : {0.0, 0.2, 1.0, 3.7, 25.0}) {
    for (bool reml : {false, true}) {
      LmmSolution sol = solve_at_lambda(f.X, f.y, f.group, lambda, reml);
      const double oracle = dense_profile_loglik(f, 6, lambda, reml);
      CHECK(sol.loglik == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("the optimizer finds the profile optimum over lambda") {
  Fixture f = slope_fixture(8, 5, 2.0, 0.4, 1.0, 0.5, 11);
  LmmFit fit = fit_random_intercept(f.X, f.y, f.group);
  // Nothing on a fine lambda grid may beat the reported optimum.
  for (int i = 0; i <= 120; ++i) {
    const double lambda = std::exp(-12.0 + 24.0 * i / 120.0);
    CHECK(fit.ml.loglik >= dense_profile_loglik(f, 8, lambda, false) - 1e-6);
    CHECK(fit.reml.loglik >= dense_profile_loglik(f, 8, lambda, true) - 1e-6);
  }
  CHECK(fit.ml.loglik >= dense_profile_loglik(f, 8, 0.0, false) - 1e-9);
  CHECK(fit.n_obs == 40);
  CHECK(fit.n_subjects == 8);
}

TEST_CASE("balanced one-way REML equals the classical moment solution") {
  const int m = 12, n = 5;
  Fixture f = balanced_oneway(m, n, 3.0, 1.5, 0.7, 13);
  LmmFit fit = fit_random_intercept(f.X, f.y, f.group);

  // Classical closed form: sigma2 = MSW, sigma_b2 = (MSB - MSW) / n.
  double grand = f.y.mean();
  double ssb = 0.0, ssw = 0.0;
  for (int i = 0; i < m; ++i) {
    const double gi = f.y.segment(i * n, n).mean();
    ssb += n * (gi - grand) * (gi - grand);
    for (int j = 0; j < n; ++j)
      ssw += (f.y[i * n + j] - gi) * (f.y[i * n + j] - gi);
  }
  const double msw = ssw / double(m * (n - 1));
  const double msb = ssb / double(m - 1);
  REQUIRE(msb > msw);  // fixture has real between-subject variance
  CHECK(fit.reml.residual_var == doctest::Approx(msw).epsilon(1e-6));
  CHECK(fit.reml.random_intercept_var ==
        doctest::Approx((msb - msw) / n).epsilon(1e-5));
  // Balanced intercept-only GLS is the grand mean at any lambda.
  CHECK(fit.reml.fixed_effects[0] == doctest::Approx(grand).epsilon(1e-10));
  CHECK(fit.ml.fixed_effects[0] == doctest::Approx(grand).epsilon(1e-10));
}

TEST_CASE("blups shrink group mean residuals by lambda n / (1 + lambda n)") {
  Fixture f = balanced_oneway(6, 4, 1.0, 1.0, 0.5, 17);
  const double lambda = 2.5;
  LmmSolution sol = solve_at_lambda(f.X, f.y, f.group, lambda, true);
  Eigen::VectorXd b = random_intercept_blups(sol, f.X, f.y, f.group);
  REQUIRE(b.size() == 6);
  for (int i = 0; i < 6; ++i) {
    double rmean = 0.0;
    for (int j = 0; j < 4; ++j)
      rmean += f.y[i * 4 + j] - sol.fixed_effects[0];
    rmean /= 4.0;
    CHECK(b[i] == doctest::Approx(lambda * 4 / (1 + lambda * 4) * rmean)
                      .epsilon(1e-10));
  }
  // Balanced intercept model: residuals sum to zero, so BLUPs do too.
  CHECK(std::abs(b.sum()) < 1e-8);
}

TEST_CASE("likelihood-ratio test behaves on nested and identical fits") {
  Fixture f = slope_fixture(10, 4, 1.0, 0.9, 0.8, 0.5, 19);
  LmmFit alt = fit_random_intercept(f.X, f.y, f.group);
  LmmFit null_fit =
      fit_random_intercept(f.X.leftCols(1), f.y, f.group);

  LrtResult r = lrt(null_fit, alt);
  CHECK(r.df == 1);
  CHECK(r.statistic > 0.0);
  CHECK(r.p_value < 0.01);  // strong true slope
  CHECK(r.p_value > 0.0);

  LrtResult same = lrt(alt, alt);
  CHECK(same.statistic == 0.0);
  CHECK(same.df == 0);
  CHECK(same.p_value == 1.0);

  CHECK_THROWS_AS(lrt(alt, null_fit), ConfigError);
}

TEST_CASE("the test statistic is invariant to affine predictor rescaling") {
  Fixture f = slope_fixture(9, 4, 0.3, 0.6, 1.0, 0.7, 23);
  LmmFit alt = fit_random_intercept(f.X, f.y, f.group);
  LmmFit null_fit = fit_random_intercept(f.X.leftCols(1), f.y, f.group);
  const double stat = lrt(null_fit, alt).statistic;

  Eigen::MatrixXd Xs = f.X;
  Xs.col(1) = 1000.0 * f.X.col(1).array() - 5.0;
  LmmFit alt2 = fit_random_intercept(Xs, f.y, f.group);
  const double stat2 = lrt(null_fit, alt2).statistic;
  CHECK(stat == doctest::Approx(stat2).epsilon(1e-8));
}

TEST_CASE("aic counts fixed effects plus two variance parameters") {
  LmmFit fake;
  fake.ml.loglik = -10.0;
  fake.ml.fixed_effects = Eigen::VectorXd::Zero(2);
  CHECK(aic(fake) == doctest::Approx(28.0).epsilon(1e-14));
  fake.ml.fixed_effects = Eigen::VectorXd::Zero(4);
  CHECK(aic(fake) == doctest::Approx(32.0).epsilon(1e-14));
}

TEST_CASE("degenerate inputs are rejected") {
  Fixture f = balanced_oneway(4, 3, 0.0, 1.0, 1.0, 29);
  std::vector<int> one_group(f.group.size(), 0);
  CHECK_THROWS_AS(fit_random_intercept(f.X, f.y, one_group, {}), DataError);

  Eigen::MatrixXd Xsing(12, 2);
  Xsing.col(0).setOnes();
  Xsing.col(1).setOnes();
  CHECK_THROWS_AS(fit_random_intercept(Xsing, f.y, f.group, {}), NumericalError);

  std::vector<int> short_group(f.group.begin(), f.group.end() - 1);
  CHECK_THROWS_AS(fit_random_intercept(f.X, f.y, short_group, {}), DataError);
  CHECK_THROWS_AS(solve_at_lambda(f.X, f.y, f.group, -0.5, false), ConfigError);
  CHECK_THROWS_AS(fit_random_intercept(f.X, f.y, f.group, {"a", "b"}), ConfigError);
}

TEST_CASE("a pure fixed-effects truth drives lambda to the boundary") {
  // No between-subject variance: the boundary lambda = 0 solution should win
  // or tie, and the fit must then match OLS to high precision.
  Fixture f = slope_fixture(10, 6, 1.0, 0.5, 0.0, 1.0, 31);
  LmmFit fit = fit_random_intercept(f.X, f.y, f.group);
  if (fit.ml.lambda == 0.0) {
    const Eigen::VectorXd ols =
        (f.X.transpose() * f.X).ldlt().solve(f.X.transpose() * f.y);
    CHECK((fit.ml.fixed_effects - ols).cwiseAbs().maxCoeff() < 1e-8);
  }
  // Whatever the winner, it cannot lose to the boundary.
  CHECK(fit.ml.loglik >= dense_profile_loglik(f, 10, 0.0, false) - 1e-9);
}
