#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "surfglm/errors.hpp"
#include "surfglm/summary.hpp"

using namespace surfglm;

namespace {

ActivationRecord rec(const std::string& subj, const std::string& visit,
                     double area, const std::string& method = "bayes",
                     double gamma = 0.0, const std::string& hemi = "lh") {
  ActivationRecord r;
  r.subject_id = subj;
  r.visit_id = visit;
  r.method = method;
  r.hemisphere = hemi;
  r.gamma = gamma;
  r.area = area;
  return r;
}

const SubjectReliability* find_subject(const ReliabilityReport& rep,
                                       const std::string& subj,
                                       const std::string& method,
                                       double gamma) {
  for (const auto& s : rep.subjects)
    if (s.subject_id == subj && s.method == method && s.gamma == gamma) return &s;
  return nullptr;
}

const MethodReliability* find_method(const ReliabilityReport& rep,
                                     const std::string& method, double gamma) {
  for (const auto& m : rep.methods)
    if (m.method == method && m.gamma == gamma) return &m;
  return nullptr;
}

}  // namespace

TEST_CASE("activation area sums vertex areas over the active set") {
  Eigen::VectorXd areas(4);
  areas << 2.0, 3.0, 5.0, 7.0;
  CHECK(activation_area({false, true, true, false}, areas) == doctest::Approx(8.0));
  CHECK(activation_area({false, false, false, false}, areas) == 0.0);
  CHECK(activation_area({true, true, true, true}, areas) ==
        doctest::Approx(17.0));
  CHECK_THROWS_AS(activation_area({true, false}, areas), DataError);
}

TEST_CASE("within-subject mean, sd and cv from frozen arithmetic") {
  std::vector<ActivationRecord> recs = {rec("s1", "v1", 1.0), rec("s1", "v2", 2.0),
                                        rec("s1", "v3", 3.0)};
  ReliabilityReport rep = reliability_stats(recs);
  const auto* s = find_subject(rep, "s1", "bayes", 0.0);
  REQUIRE(s != nullptr);
  CHECK(s->n_visits == 3);
  CHECK(s->mean_area == doctest::Approx(2.0));
  // Sample SD of {1,2,3} is exactly 1.
  REQUIRE(s->sd_area.has_value());
  CHECK(*s->sd_area == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(s->cv.has_value());
  CHECK(*s->cv == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("constant areas give zero sd and zero cv") {
  std::vector<ActivationRecord> recs = {rec("s1", "v1", 10.0),
                                        rec("s1", "v2", 10.0),
                                        rec("s1", "v3", 10.0)};
  ReliabilityReport rep = reliability_stats(recs);
  const auto* s = find_subject(rep, "s1", "bayes", 0.0);
  REQUIRE(s != nullptr);
  CHECK(*s->sd_area == doctest::Approx(0.0));
  CHECK(*s->cv == doctest::Approx(0.0));
}

TEST_CASE("missing values: single visit has no sd, zero mean has no cv") {
  std::vector<ActivationRecord> recs = {rec("solo", "v1", 4.0),
                                        rec("zero", "v1", 0.0),
                                        rec("zero", "v2", 0.0)};
  ReliabilityReport rep = reliability_stats(recs);
  const auto* solo = find_subject(rep, "solo", "bayes", 0.0);
  REQUIRE(solo != nullptr);
  CHECK(solo->n_visits == 1);
  CHECK_FALSE(solo->sd_area.has_value());
  CHECK_FALSE(solo->cv.has_value());

  const auto* zero = find_subject(rep, "zero", "bayes", 0.0);
  REQUIRE(zero != nullptr);
  CHECK(zero->sd_area.has_value());
  CHECK_FALSE(zero->cv.has_value());
}

TEST_CASE("cells are split by method, gamma and hemisphere") {
  std::vector<ActivationRecord> recs = {
      rec("s1", "v1", 1.0, "bayes", 0.0), rec("s1", "v2", 3.0, "bayes", 0.0),
      rec("s1", "v1", 5.0, "bayes", 1.0), rec("s1", "v2", 7.0, "bayes", 1.0),
      rec("s1", "v1", 2.0, "classical-fdr", 0.0),
      rec("s1", "v2", 6.0, "classical-fdr", 0.0),
      rec("s1", "v1", 9.0, "bayes", 0.0, "rh")};
  ReliabilityReport rep = reliability_stats(recs);

  const auto* g0 = find_subject(rep, "s1", "bayes", 0.0);
  const auto* g1 = find_subject(rep, "s1", "bayes", 1.0);
  const auto* fdr = find_subject(rep, "s1", "classical-fdr", 0.0);
  REQUIRE(g0 != nullptr);
  REQUIRE(g1 != nullptr);
  REQUIRE(fdr != nullptr);
  CHECK(g0->mean_area == doctest::Approx(2.0));  // rh record is a separate cell
  CHECK(g0->n_visits == 2);
  CHECK(g1->mean_area == doctest::Approx(6.0));
  CHECK(fdr->mean_area == doctest::Approx(4.0));

  int rh_cells = 0;
  for (const auto& s : rep.subjects)
    if (s.hemisphere == "rh") ++rh_cells;
  CHECK(rh_cells == 1);
}

TEST_CASE("between-subject statistics and the sd-versus-mean line") {
  // Two subjects with three visits each; hand-computable.
  // s1 areas {1, 2, 3}: mean 2,  sd 1.   s2 areas {8, 10, 12}: mean 10, sd 2.
  std::vector<ActivationRecord> recs = {
      rec("s1", "v1", 1.0), rec("s1", "v2", 2.0), rec("s1", "v3", 3.0),
      rec("s2", "v1", 8.0), rec("s2", "v2", 10.0), rec("s2", "v3", 12.0)};
  ReliabilityReport rep = reliability_stats(recs);
  const auto* m = find_method(rep, "bayes", 0.0);
  REQUIRE(m != nullptr);
  CHECK(m->n_subjects == 2);

  // Subject means {2, 10}: mean 6, sample sd = sqrt(32) = 4 sqrt(2).
  REQUIRE(m->between_cv.has_value());
  CHECK(*m->between_cv == doctest::Approx(std::sqrt(32.0) / 6.0).epsilon(1e-12));

  // Two points (2, 1) and (10, 2): slope 1/8, intercept 3/4.
  REQUIRE(m->sd_vs_mean_slope.has_value());
  REQUIRE(m->sd_vs_mean_intercept.has_value());
  CHECK(*m->sd_vs_mean_slope == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(*m->sd_vs_mean_intercept == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("statistics scale correctly under a common area rescaling") {
  std::vector<ActivationRecord> recs = {
      rec("s1", "v1", 1.0), rec("s1", "v2", 2.0), rec("s1", "v3", 3.0),
      rec("s2", "v1", 8.0), rec("s2", "v2", 10.0), rec("s2", "v3", 12.0)};
  std::vector<ActivationRecord> scaled = recs;
  for (auto& r : scaled) r.area *= 3.5;

  ReliabilityReport a = reliability_stats(recs);
  ReliabilityReport b = reliability_stats(scaled);
  const auto* sa = find_subject(a, "s1", "bayes", 0.0);
  const auto* sb = find_subject(b, "s1", "bayes", 0.0);
  REQUIRE(sa != nullptr);
  REQUIRE(sb != nullptr);
  // CV is scale free; mean and SD scale linearly.
  CHECK(*sb->cv == doctest::Approx(*sa->cv).epsilon(1e-12));
  CHECK(sb->mean_area == doctest::Approx(3.5 * sa->mean_area).epsilon(1e-12));
  CHECK(*sb->sd_area == doctest::Approx(3.5 * *sa->sd_area).epsilon(1e-12));
  const auto* ma = find_method(a, "bayes", 0.0);
  const auto* mb = find_method(b, "bayes", 0.0);
  CHECK(*mb->between_cv == doctest::Approx(*ma->between_cv).epsilon(1e-12));
  CHECK(*mb->sd_vs_mean_slope ==
        doctest::Approx(*ma->sd_vs_mean_slope).epsilon(1e-12));
}

TEST_CASE("single-subject cells have no between-subject line") {
  std::vector<ActivationRecord> recs = {rec("s1", "v1", 1.0),
                                        rec("s1", "v2", 2.0)};
  ReliabilityReport rep = reliability_stats(recs);
  const auto* m = find_method(rep, "bayes", 0.0);
  REQUIRE(m != nullptr);
  CHECK(m->n_subjects == 1);
  // A regression of SD on mean needs at least two subjects.
  CHECK_FALSE(m->sd_vs_mean_slope.has_value());
}

TEST_CASE("empty input gives an empty report") {
  ReliabilityReport rep = reliability_stats({});
  CHECK(rep.subjects.empty());
  CHECK(rep.methods.empty());
}
