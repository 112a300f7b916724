#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace surfglm {

/// Serial day number for a calendar date (days since 1970-01-01, negative
/// before). Validates the calendar date.
long civil_to_days(int year, int month, int day);

/// Parses "YYYY-MM-DD".
long parse_date(const std::string& iso);

std::string format_date(long days);

/// One clinical assessment. The 12 ALSFRS-R items are stored in canonical
/// order: speech, salivation, swallowing, handwriting, cutting food,
/// dressing/hygiene, turning in bed, walking, climbing stairs, dyspnea,
/// orthopnea, respiratory insufficiency. A value of -1 marks a missing item.
struct ClinicalVisit {
  std::string subject_id;
  std::string group;  // "ALS" or "HC"
  std::string visit_id;
  long visit_date = 0;
  long enrollment_date = 0;
  std::optional<long> onset_date;  // ALS only
  std::array<int, 12> items{};

  int total_score() const;  // throws on missing items
};

/// Indices (0-based) of the hand-motor items: handwriting, cutting,
/// dressing/hygiene.
inline constexpr std::array<int, 3> kHandItems = {3, 4, 5};

struct DisabilityScores {
  double total = 0.0;  // 1 - total/48
  double hand = 0.0;   // 1 - hand_sum/12
  double other = 0.0;  // 1 - other_sum/36
};

/// Disability predictors on [0, 1]; 0 = no impairment. Missing items are an
/// error (no imputation).
DisabilityScores disability_scores(const ClinicalVisit& visit);

enum class ProgressionClass { Slow, Moderate, Fast };

std::string to_string(ProgressionClass c);

struct ProgressionRate {
  double rate_per_month = 0.0;  // (48 - last score) / months since onset
  ProgressionClass cls = ProgressionClass::Slow;
};

/// Progression rate from onset to the last visit, months = days / 30.4375.
/// Classes: slow < 0.1, moderate in [0.1, 0.7), fast >= 0.7.
ProgressionRate progression_rate(const std::vector<ClinicalVisit>& visits,
                                 long onset_date);

ProgressionClass classify_rate(double rate_per_month);

struct WindowRules {
  int window_days = 730;
  std::set<std::string> exclude_subjects;  // dropped entirely
};

/// Longitudinal windowing: for ALS subjects keep only visits inside the
/// window_days-long interval (anchored at one of the subject's visit dates)
/// that maximizes the within-window range of the total ALSFRS-R score, ties
/// going to the earliest anchor; for HC subjects drop visits more than
/// window_days after enrollment. Excluded subjects are removed.
std::vector<ClinicalVisit> apply_windowing(std::vector<ClinicalVisit> visits,
                                           const WindowRules& rules);

}  // namespace surfglm
