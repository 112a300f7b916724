#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace surfglm {

/// One activation-area measurement: a subject/visit/method/threshold cell.
struct ActivationRecord {
  std::string subject_id;
  std::string visit_id;
  std::string method;  // "bayes" | "classical-bonferroni" | "classical-fdr"
  std::string hemisphere;
  double gamma = 0.0;  // activation threshold (percent signal change)
  double area = 0.0;   // mm^2
};

/// Sum of vertex areas over the active set.
double activation_area(const std::vector<bool>& active,
                       const Eigen::VectorXd& vertex_areas);

/// Per subject within one (method, gamma, hemisphere) cell: mean and sample
/// SD of area across visits, and their ratio (the within-subject coefficient
/// of variation). SD/CV need >= 2 visits; CV is missing when the mean is 0.
struct SubjectReliability {
  std::string subject_id;
  std::string method;
  std::string hemisphere;
  double gamma = 0.0;
  int n_visits = 0;
  double mean_area = 0.0;
  std::optional<double> sd_area;
  std::optional<double> cv;
};

/// Per (method, gamma, hemisphere) cell: between-subject CV of the subject
/// means, and the OLS slope/intercept of SD on mean over subjects (the
/// SD-versus-mean regression line).
struct MethodReliability {
  std::string method;
  std::string hemisphere;
  double gamma = 0.0;
  int n_subjects = 0;
  std::optional<double> between_cv;
  std::optional<double> sd_vs_mean_slope;
  std::optional<double> sd_vs_mean_intercept;
};

struct ReliabilityReport {
  std::vector<SubjectReliability> subjects;
  std::vector<MethodReliability> methods;
};

/// Groups records by (method, gamma, hemisphere) and within each cell by
/// subject, then computes within-subject and between-subject variability.
/// Sample (n-1) standard deviations throughout.
ReliabilityReport reliability_stats(const std::vector<ActivationRecord>& records);

}  // namespace surfglm
