#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "surfglm/errors.hpp"
#include "surfglm/rng.hpp"
#include "surfglm/scrub.hpp"

using namespace surfglm;

namespace {

Eigen::MatrixXd smooth_series(int T, int V, std::uint64_t seed) {
  rng::Engine eng(seed);
  Eigen::MatrixXd Y(T, V);
  for (int v = 0; v < V; ++v) {
    const double phase = eng.uniform() * 6.28;
    for (int t = 0; t < T; ++t)
      Y(t, v) = std::sin(0.2 * t + phase) + 0.3 * eng.normal();
  }
  return Y;
}

}  // namespace

TEST_CASE("leverage sums to the retained component count") {
  Eigen::MatrixXd Y = smooth_series(60, 12, 1);
  ScrubResult r = scrub_session(Y);
  CHECK(r.n_components >= 1);
  CHECK(r.leverage.minCoeff() >= 0.0);
  CHECK(r.leverage.sum() == doctest::Approx(double(r.n_components)).epsilon(1e-10));
}

TEST_CASE("an injected spike volume attains maximal leverage and is flagged") {
  Eigen::MatrixXd Y = smooth_series(80, 15, 2);
  const double amp = Y.cwiseAbs().maxCoeff();
  Y.row(37).setConstant(10.0 * amp);
  ScrubResult r = scrub_session(Y);
  int argmax = 0;
  r.leverage.maxCoeff(&argmax);
  CHECK(argmax == 37);
  CHECK_FALSE(r.keep[37]);
  CHECK(r.n_flagged >= 1);
}

TEST_CASE("a moderate spike is the only flagged volume and keeps the session") {
  Eigen::MatrixXd Y = smooth_series(80, 15, 2);
  const double amp = Y.cwiseAbs().maxCoeff();
  Y.row(37).setConstant(3.0 * amp);
  ScrubResult r = scrub_session(Y);
  CHECK_FALSE(r.keep[37]);
  CHECK(r.n_flagged == 1);
  CHECK(r.session_usable);
}

TEST_CASE("scrubbing is invariant to positive rescaling of the data") {
  Eigen::MatrixXd Y = smooth_series(50, 8, 3);
  Y.row(11).setConstant(25.0);
  ScrubResult a = scrub_session(Y);
  ScrubResult b = scrub_session(137.5 * Y);
  CHECK(a.keep == b.keep);
  CHECK(a.n_components == b.n_components);
  CHECK((a.leverage - b.leverage).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("row duplication halves every leverage value") {
  Eigen::MatrixXd Y = smooth_series(40, 10, 4);
  ScrubResult single = scrub_session(Y);
  Eigen::MatrixXd D(80, 10);
  D.topRows(40) = Y;
  D.bottomRows(40) = Y;
  ScrubResult doubled = scrub_session(D);
  REQUIRE(doubled.n_components == single.n_components);
  for (int t = 0; t < 40; ++t) {
    CHECK(doubled.leverage[t] ==
          doctest::Approx(0.5 * single.leverage[t]).epsilon(1e-8));
    CHECK(doubled.leverage[t + 40] ==
          doctest::Approx(doubled.leverage[t]).epsilon(1e-8));
  }
}

TEST_CASE("threshold arithmetic: fraction above the limit drops the session") {
  // One dominant component whose scores put >25% of volumes past 4x median.
  const int T = 20;
  Eigen::MatrixXd Y(T, 5);
  Y.setZero();
  rng::Engine eng(5);
  for (int t = 0; t < T; ++t) Y(t, 0) = 0.01 * eng.normal();
  for (int t = 0; t < 6; ++t) Y(t, 0) += 50.0 + t;  // six extreme volumes
  ScrubResult r = scrub_session(Y);
  CHECK(r.n_flagged >= 6);
  CHECK(r.flagged_fraction() > 0.25);
  CHECK_FALSE(r.session_usable);
}

TEST_CASE("clean sessions are rarely excluded") {
  int excluded = 0;
  for (int rep = 0; rep < 200; ++rep) {
    rng::Engine eng(1000 + rep);
    Eigen::MatrixXd Y(100, 20);
    for (int v = 0; v < 20; ++v)
      for (int t = 0; t < 100; ++t) Y(t, v) = eng.normal();
    if (!scrub_session(Y).session_usable) ++excluded;
  }
  CHECK(excluded < 10);  // < 5% of 200
}

TEST_CASE("ties at exactly the threshold are not flagged") {
  ScrubOptions opts;
  opts.leverage_multiplier = 1.0;  // threshold == median
  Eigen::MatrixXd Y = smooth_series(30, 6, 6);
  ScrubResult r = scrub_session(Y, opts);
  // With threshold = median, roughly half the volumes exceed it, but any
  // volume exactly at the median must be kept.
  for (int t = 0; t < 30; ++t)
    if (r.leverage[t] == r.threshold) CHECK(r.keep[t]);
  CHECK(r.n_flagged < 30);
}

TEST_CASE("scrub_session input validation") {
  CHECK_THROWS_AS(scrub_session(Eigen::MatrixXd::Zero(2, 5)), DataError);
  ScrubOptions opts;
  opts.leverage_multiplier = 0.0;
  CHECK_THROWS_AS(scrub_session(Eigen::MatrixXd::Random(10, 3), opts), ConfigError);
}
