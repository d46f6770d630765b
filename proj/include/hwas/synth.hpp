#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hwas/exposure.hpp"

namespace hwas {

// Temperature field for the generator: a seasonal arc plus AR(1) noise for
// the shared citywide component, then a fixed per-tract offset and
// independent per-tract daily noise on top.
struct TempField {
  double mean_c = 27.0;
  double seasonal_amplitude = 4.0;
  double daily_sigma = 3.0;
  double ar1 = 0.3;
  // moving-average weight on the innovation four days back; negative values
  // anticorrelate a day with its lag-4 day (used by verification scenarios
  // that need a lag-4 signal kept out of the 0-3 window)
  double ma4 = 0.0;
  double tract_offset_sd = 0.5;
  double tract_noise_sd = 0.3;
};

struct CalendarEffects {
  double dow_amplitude = 0.05;
  double month_amplitude = 0.03;
  double year_amplitude = 0.03;
  double holiday = -0.10;
};

struct DemographicMix {
  double p_female = 0.55;
  double p_male = 0.435;
  double p_sex_other = 0.01;
  double p_age_missing = 0.05;
  double p_tract_missing = 0.0;
};

// Per-code injected signal on the log-rate scale. Linear kind:
// f(t, l) = slope[l] * (t - p50). Step kind: f(t, l) = slope[l] * [t >= tau]
// with tau the threshold_pct quantile of the citywide warm-season series.
struct InjectedEffect {
  enum class Kind { Linear, Step };
  std::string code;
  std::vector<double> lag_slopes;
  double baseline_rate = -1.0;  // per-day expected count; negative = use scenario default
  Kind kind = Kind::Linear;
  double threshold_pct = 0.85;  // step kind only
};

struct SynthScenario {
  int n_codes = 200;
  int n_tracts = 5;
  std::set<unsigned> season_months = {5, 6, 7, 8, 9};
  int year_min = 2011;
  int year_max = 2023;
  int lead_days = 35;   // temperature coverage before each season start
  int trail_days = 28;  // coverage after season end (fixed-28 referent tiles)
  double baseline_rate = 0.5;
  double baseline_spread = 2.0;  // per-code baselines log-uniform in rate/spread..rate*spread
  double overdispersion = 0.0;   // gamma-mixing variance; 0 = plain Poisson
  TempField temp;
  CalendarEffects calendar;
  DemographicMix demographics;
  std::vector<InjectedEffect> effects;
  std::uint64_t seed = 1;

  static SynthScenario load(const std::string& path);
  std::string hash() const;
  std::string canonical_json() const;
};

struct SynthOutput {
  std::string visits_path;
  std::string temperature_path;
  std::string holidays_path;
  std::string truth_path;
  PercentileAnchors anchors;  // computed from the generated citywide series
  long long n_visits = 0;
};

// Deterministic code naming: index -> "A00", "A01", ..."B00", ...
std::string synth_code_name(int index);

// Writes visits.csv / temperature.csv / holidays.csv / truth.csv under
// out_dir. truth.csv carries each code's analytic lag-specific and
// cumulative log odds ratios at the generated series' P95-vs-P50 contrast.
SynthOutput generate_synthetic(const SynthScenario& scenario, const std::string& out_dir);

// US federal-style holidays inside the warm season: Memorial Day, July 4,
// Labor Day.
std::set<Date> synth_holidays(int year_min, int year_max);

}  // namespace hwas
