#include "surfglm/clinical.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "surfglm/errors.hpp"

namespace surfglm {

long civil_to_days(int year, int month, int day) {
  if (month < 1 || month > 12) throw DataError("invalid month in date");
  static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const int dmax = (month == 2 && leap) ? 29 : mdays[month - 1];
  if (day < 1 || day > dmax) throw DataError("invalid day of month in date");

  // Days-from-civil via the shifted (March-based) calendar; exact for the
  // proleptic Gregorian calendar.
  const int y = year - (month <= 2);
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = static_cast<unsigned>(month + (month > 2 ? -3 : 9));
  const unsigned doy = (153 * mp + 2) / 5 + static_cast<unsigned>(day) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

long parse_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(iso.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3)
    throw DataError("date not in YYYY-MM-DD format: '" + iso + "'");
  return civil_to_days(y, m, d);
}

std::string format_date(long days) {
  // Inverse of civil_to_days.
  long z = days + 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", y + (m <= 2), m, d);
  return buf;
}

int ClinicalVisit::total_score() const {
  int total = 0;
  for (int i = 0; i < 12; ++i) {
    if (items[static_cast<size_t>(i)] < 0 || items[static_cast<size_t>(i)] > 4)
      throw DataError("subject " + subject_id + ": ALSFRS item " +
                      std::to_string(i + 1) + " missing or out of range");
    total += items[static_cast<size_t>(i)];
  }
  return total;
}

DisabilityScores disability_scores(const ClinicalVisit& visit) {
  const int total = visit.total_score();
  int hand = 0;
  for (int i : kHandItems) hand += visit.items[static_cast<size_t>(i)];
  const int other = total - hand;

  DisabilityScores s;
  s.total = 1.0 - double(total) / 48.0;
  s.hand = 1.0 - double(hand) / 12.0;
  s.other = 1.0 - double(other) / 36.0;
  return s;
}

std::string to_string(ProgressionClass c) {
  switch (c) {
    case ProgressionClass::Slow: return "slow";
    case ProgressionClass::Moderate: return "moderate";
    case ProgressionClass::Fast: return "fast";
  }
  return "?";
}

ProgressionClass classify_rate(double rate_per_month) {
  if (rate_per_month < 0.1) return ProgressionClass::Slow;
  if (rate_per_month < 0.7) return ProgressionClass::Moderate;
  return ProgressionClass::Fast;
}

ProgressionRate progression_rate(const std::vector<ClinicalVisit>& visits,
                                 long onset_date) {
  if (visits.empty()) throw DataError("progression_rate: no visits");
  const ClinicalVisit* last = &visits.front();
  for (const auto& v : visits)
    if (v.visit_date > last->visit_date) last = &v;
  if (onset_date >= last->visit_date)
    throw DataError("progression_rate: onset on or after the last visit");

  const double months = double(last->visit_date - onset_date) / 30.4375;
  ProgressionRate r;
  r.rate_per_month = (48.0 - double(last->total_score())) / months;
  r.cls = classify_rate(r.rate_per_month);
  return r;
}

std::vector<ClinicalVisit> apply_windowing(std::vector<ClinicalVisit> visits,
                                           const WindowRules& rules) {
  std::map<std::string, std::vector<ClinicalVisit>> by_subject;
  for (auto& v : visits) {
    if (rules.exclude_subjects.count(v.subject_id)) continue;
    by_subject[v.subject_id].push_back(std::move(v));
  }

  std::vector<ClinicalVisit> out;
  for (auto& [subject, vs] : by_subject) {
    std::sort(vs.begin(), vs.end(), [](const ClinicalVisit& a, const ClinicalVisit& b) {
      return a.visit_date < b.visit_date;
    });
    if (vs.front().group == "HC") {
      for (auto& v : vs)
        if (v.visit_date - v.enrollment_date <= rules.window_days)
          out.push_back(std::move(v));
      continue;
    }

    // ALS: anchor the window at each visit date in turn and keep the window
    // with the largest total-score range; earliest anchor wins ties.
    long best_anchor = vs.front().visit_date;
    int best_range = -1;
    for (const auto& anchor : vs) {
      int lo = 48, hi = 0;
      for (const auto& v : vs) {
        if (v.visit_date >= anchor.visit_date &&
            v.visit_date <= anchor.visit_date + rules.window_days) {
          const int t = v.total_score();
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
      }
      const int range = hi - lo;
      if (range > best_range) {
        best_range = range;
        best_anchor = anchor.visit_date;
      }
    }
    for (auto& v : vs)
      if (v.visit_date >= best_anchor &&
          v.visit_date <= best_anchor + rules.window_days)
        out.push_back(std::move(v));
  }
  return out;
}

}  // namespace surfglm
