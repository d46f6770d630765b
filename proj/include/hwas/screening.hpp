#pragma once

#include <set>
#include <string>
#include <vector>

#include "hwas/exposure.hpp"
#include "hwas/glmfit.hpp"
#include "hwas/ingest.hpp"

namespace hwas {

struct ScreeningRow {
  std::string code;
  double irr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double raw_p = 1.0;
  double adj_p = 1.0;
  long long total_count = 0;
  double rel_freq_above_p70 = 0.0;
  bool crit_slope = false;  // beta > 0 and adjusted p below alpha
  bool crit_freq = false;   // rel_freq >= threshold (hot day = tmax > p70)
  bool crit_count = false;  // total in-season count >= floor
  bool retained = false;
  bool fit_ok = false;
  std::string fail_reason;
};

struct ScreenSettings {
  double alpha = 0.05;
  long long min_count = 100;
  double min_rel_freq = 0.30;
  double tol = 1e-8;
  int max_iter = 50;
  unsigned workers = 1;
};

// Zero-filled per-day counts of visits carrying the code, over the given
// calendar (one entry per calendar day, in order).
std::vector<double> daily_counts(const std::vector<VisitRecord>& visits, const std::string& code,
                                 const std::vector<Date>& calendar);

// Benjamini-Hochberg step-up adjustment, mapped back to input order.
std::vector<double> bh_adjust(const std::vector<double>& pvalues);

// All in-season days covered by the citywide series within the year range.
std::vector<Date> season_calendar(const ExposureSeries& series,
                                  const std::set<unsigned>& season_months, int year_min,
                                  int year_max);

// Shared stage-1 design: intercept, citywide tmax, then year / month /
// day-of-week factors (first level as reference) and the holiday indicator.
DesignMatrix screening_design(const std::vector<Date>& calendar, const ExposureSeries& series,
                              const std::set<Date>& holidays);

// One quasi-Poisson screen per diagnosis category observed in the corpus;
// BH is applied across every fitted code. Output sorted by adjusted p then
// code; per-code fit failures land in the row, never abort the batch.
std::vector<ScreeningRow> screen(const std::vector<VisitRecord>& visits,
                                 const ExposureSeries& series, const PercentileAnchors& anchors,
                                 const std::set<Date>& holidays, const ScreenSettings& settings);

}  // namespace hwas
