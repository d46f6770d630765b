#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hwas/crossover.hpp"
#include "hwas/ingest.hpp"

namespace hwas {

// Every tunable in one place; defaults are the primary analysis. Loaded from
// a JSON file, with CLI flags taking precedence over file keys.
struct RunConfig {
  std::set<unsigned> season_months = {5, 6, 7, 8, 9};
  int year_min = 2011;
  int year_max = 2023;

  double target_percentile = 0.95;
  double ref_percentile = 0.50;
  double screen_percentile = 0.70;
  double alpha = 0.05;
  long long min_count = 100;
  double min_rel_freq = 0.30;

  int max_lag = 3;
  int exposure_degree = 2;
  int lag_knots = 1;
  ReferentKind referent = ReferentKind::TimeStratifiedMonth;

  int min_age = 18;
  bool keep_missing_age = true;
  MissingTractPolicy missing_tract = MissingTractPolicy::Exclude;
  bool extreme_strict = false;  // ">=" by default, ">" when set
  // subgroup runs reuse the pooled stage-1 list by default; set to rescreen
  // stage 1 inside each stratum instead
  bool stratified_rescreen = false;

  std::vector<std::string> variants = {"primary", "sens_i", "sens_ii", "sens_iii", "sens_iv"};
  std::uint64_t seed = 1;
  unsigned workers = 1;

  // input paths (temperature either pre-linked, or grid + membership)
  std::string visits_path;
  std::string temperature_path;
  std::string grid_path;
  std::string membership_path;
  std::string holidays_path;
  std::string gem_path;
  std::string descriptions_path;

  static RunConfig load(const std::string& path);
  std::string canonical_json() const;
  std::string hash() const;

  // The variant implied by this config's model fields ("primary" when they
  // match the defaults, a sens_* name when they match exactly one variant,
  // "custom" otherwise).
  std::string classify_variant() const;
  AnalysisVariant primary_variant() const;

  void validate() const;
};

}  // namespace hwas
