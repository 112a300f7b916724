#include "surfglm/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "surfglm/errors.hpp"

namespace surfglm {

double activation_area(const std::vector<bool>& active,
                       const Eigen::VectorXd& vertex_areas) {
  if (static_cast<Eigen::Index>(active.size()) != vertex_areas.size())
    throw DataError("activation_area: active map length != vertex count");
  double area = 0.0;
  for (Eigen::Index v = 0; v < vertex_areas.size(); ++v)
    if (active[static_cast<size_t>(v)]) area += vertex_areas[v];
  return area;
}

namespace {

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double sample_sd(const std::vector<double>& x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(x.size() - 1));
}

}  // namespace

ReliabilityReport reliability_stats(const std::vector<ActivationRecord>& records) {
  using CellKey = std::tuple<std::string, double, std::string>;  // method, gamma, hemi
  std::map<CellKey, std::map<std::string, std::vector<double>>> cells;
  for (const auto& r : records)
    cells[{r.method, r.gamma, r.hemisphere}][r.subject_id].push_back(r.area);

  ReliabilityReport report;
  for (const auto& [key, by_subject] : cells) {
    const auto& [method, gamma, hemi] = key;

    std::vector<double> subject_means;
    std::vector<std::pair<double, double>> mean_sd_points;
    for (const auto& [subject, areas] : by_subject) {
      SubjectReliability s;
      s.subject_id = subject;
      s.method = method;
      s.hemisphere = hemi;
      s.gamma = gamma;
      s.n_visits = static_cast<int>(areas.size());
      s.mean_area = mean_of(areas);
      if (areas.size() >= 2) {
        s.sd_area = sample_sd(areas, s.mean_area);
        if (s.mean_area != 0.0) s.cv = *s.sd_area / s.mean_area;
        mean_sd_points.emplace_back(s.mean_area, *s.sd_area);
      }
      subject_means.push_back(s.mean_area);
      report.subjects.push_back(std::move(s));
    }

    MethodReliability m;
    m.method = method;
    m.hemisphere = hemi;
    m.gamma = gamma;
    m.n_subjects = static_cast<int>(by_subject.size());
    if (subject_means.size() >= 2) {
      const double grand = mean_of(subject_means);
      if (grand != 0.0) m.between_cv = sample_sd(subject_means, grand) / grand;
    }
    if (mean_sd_points.size() >= 2) {
      // OLS of SD on mean with intercept.
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = double(mean_sd_points.size());
      for (auto [x, y] : mean_sd_points) {
        sx += x; sy += y; sxx += x * x; sxy += x * y;
      }
      const double denom = n * sxx - sx * sx;
      if (denom > 0.0) {
        m.sd_vs_mean_slope = (n * sxy - sx * sy) / denom;
        m.sd_vs_mean_intercept = (sy - *m.sd_vs_mean_slope * sx) / n;
      }
    }
    report.methods.push_back(std::move(m));
  }
  return report;
}

}  // namespace surfglm
