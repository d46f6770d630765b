#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hwas/clogitfit.hpp"
#include "hwas/dlnm.hpp"
#include "hwas/exposure.hpp"
#include "hwas/ingest.hpp"

namespace hwas {

enum class ReferentKind { TimeStratifiedMonth, Fixed28Day };

struct ReferentScheme {
  ReferentKind kind = ReferentKind::TimeStratifiedMonth;
  // Fixed28Day tiles anchor on the first in-season Monday of the case's
  // year and repeat every 28 days (backwards too, for the few season days
  // before the anchor).
  unsigned season_start_month = 5;
};

// Control days for one case day. Month scheme: every other same-weekday day
// of the same calendar month and year. Fixed scheme: the 3 other same-weekday
// days in the case's 28-day tile.
std::vector<Date> select_referents(Date case_date, const ReferentScheme& scheme);

// How stage 2 locates a visit's exposure when the tract is missing or absent
// from the series.
enum class MissingTractPolicy { Exclude, Citywide };

struct AnalysisVariant {
  std::string name = "primary";
  double ref_percentile = 0.50;
  double target_percentile = 0.95;
  int exposure_degree = 2;  // quadratic; the cubic variant uses 3
  int max_lag = 3;
  int lag_knots = 1;
  ReferentKind referent = ReferentKind::TimeStratifiedMonth;
};

// The primary model and the four sensitivity variants.
AnalysisVariant make_variant(const std::string& name);
std::vector<std::string> all_variant_names();

// Min/max temperature over the dates a variant's strata can touch: season
// days, plus max_lag days back, plus the 28-day referent tiling on both
// sides under the fixed scheme. These become the exposure-basis boundaries
// so every lagged member temperature is in-domain without dead basis
// regions.
std::pair<double, double> touched_value_range(const ExposureSeries& series,
                                              const PercentileAnchors& anchors, int lookback_days,
                                              int lookahead_days);

CrossBasisSpec crossbasis_for(const AnalysisVariant& variant, const PercentileAnchors& anchors,
                              const ExposureSeries& series);

struct StrataBuildStats {
  long long visits_total = 0;
  long long strata_built = 0;
  long long dropped_missing_exposure = 0;
  long long dropped_missing_tract = 0;
  long long dropped_no_controls = 0;
};

// One stratum per visit: the case day plus its referent days, rows =
// cross-basis of the lagged tract temperatures plus the holiday indicator.
std::vector<Stratum> build_strata(const std::vector<VisitRecord>& visits,
                                  const ExposureSeries& series, const ReferentScheme& scheme,
                                  const CrossBasis& cb, const std::set<Date>& holidays,
                                  MissingTractPolicy policy, StrataBuildStats* stats);

struct StageTwoResult {
  std::string code;
  std::string variant;
  std::vector<EffectEstimate> estimates;
  StabilityFlags stability;
  bool significant = false;  // lag-0 lower CI > 1
  long long n_strata = 0;
  long long n_dropped_strata = 0;
  bool fit_ok = false;
  std::string fail_reason;
};

struct StageTwoSettings {
  MissingTractPolicy missing_tract = MissingTractPolicy::Exclude;
  double tol = 1e-8;
  int max_iter = 50;
  unsigned workers = 1;
};

// DLNM case-crossover fits for the retained codes under one variant.
// Per-code failures are recorded in the result, never thrown.
std::vector<StageTwoResult> run_stage2(const std::vector<std::string>& codes,
                                       const std::vector<VisitRecord>& visits,
                                       const ExposureSeries& series,
                                       const PercentileAnchors& anchors,
                                       const std::set<Date>& holidays,
                                       const AnalysisVariant& variant,
                                       const StageTwoSettings& settings);

enum class StratVar { SexVar, AgeGroup, RaceEthnicity, RegionVar };
const char* strat_var_name(StratVar v);
// Stratum label for a visit under the given stratification; empty = Missing
// (excluded from that stratification).
std::string stratum_label(const VisitRecord& v, StratVar var);
std::vector<std::string> stratum_levels(StratVar var);

struct StratifiedResult {
  std::string strat_var;
  std::string stratum;
  StageTwoResult result;
};

// codes is the pooled stage-1 list; when rescreen is non-null, stage 1 is
// rerun inside each stratum and its retained codes replace the pooled list
// for that stratum.
std::vector<StratifiedResult> run_stratified(const std::vector<std::string>& codes,
                                             const std::vector<VisitRecord>& visits,
                                             const ExposureSeries& series,
                                             const PercentileAnchors& anchors,
                                             const std::set<Date>& holidays,
                                             const AnalysisVariant& variant,
                                             const StageTwoSettings& settings, StratVar var,
                                             const struct ScreenSettings* rescreen = nullptr);

struct SensitivityDiff {
  std::string variant;
  std::vector<std::string> dropped_from_primary;
  std::vector<std::string> newly_detected;
};

// Table-style comparison of each variant's significant set against the
// primary's.
std::vector<SensitivityDiff> sensitivity_diff(
    const std::vector<StageTwoResult>& primary,
    const std::map<std::string, std::vector<StageTwoResult>>& variants);

}  // namespace hwas
