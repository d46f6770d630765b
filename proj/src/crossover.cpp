#include "hwas/crossover.hpp"

#include <algorithm>
#include <cmath>

#include "hwas/errors.hpp"
#include "hwas/screening.hpp"
#include "hwas/workers.hpp"

namespace hwas {

namespace {

// first Monday on or after the 1st of the season start month
Date fixed_window_anchor(int year, unsigned season_start_month) {
  Date d = *Date::make(year, season_start_month, 1);
  while (d.iso_weekday() != 1) d = d + 1;
  return d;
}

int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

}  // namespace

std::vector<Date> select_referents(Date case_date, const ReferentScheme& scheme) {
  std::vector<Date> controls;
  if (scheme.kind == ReferentKind::TimeStratifiedMonth) {
    const int y = case_date.year();
    const unsigned m = case_date.month();
    // walk the month by weeks in both directions
    for (Date d = case_date - 28; d <= case_date + 28; d = d + 7) {
      if (d == case_date) continue;
      if (d.year() == y && d.month() == m) controls.push_back(d);
    }
  } else {
    const Date anchor = fixed_window_anchor(case_date.year(), scheme.season_start_month);
    const int offset = case_date - anchor;
    const Date window_start = anchor + 28 * floor_div(offset, 28);
    const Date first_same_weekday = window_start + (case_date - window_start) % 7;
    for (int j = 0; j < 4; ++j) {
      const Date d = first_same_weekday + 7 * j;
      if (d != case_date) controls.push_back(d);
    }
  }
  if (controls.empty()) throw Error(Errc::NoControls, "singleton stratum for " + case_date.str());
  return controls;
}

AnalysisVariant make_variant(const std::string& name) {
  AnalysisVariant v;
  v.name = name;
  if (name == "primary") return v;
  if (name == "sens_i") {  // higher reference temperature
    v.ref_percentile = 0.70;
    return v;
  }
  if (name == "sens_ii") {  // fixed 28-day referent windows
    v.referent = ReferentKind::Fixed28Day;
    return v;
  }
  if (name == "sens_iii") {  // cubic exposure basis
    v.exposure_degree = 3;
    return v;
  }
  if (name == "sens_iv") {  // lags 0-5, two log-spaced lag knots
    v.max_lag = 5;
    v.lag_knots = 2;
    return v;
  }
  throw Error(Errc::InvalidInput, "unknown analysis variant: " + name);
}

std::vector<std::string> all_variant_names() {
  return {"primary", "sens_i", "sens_ii", "sens_iii", "sens_iv"};
}

std::pair<double, double> touched_value_range(const ExposureSeries& series,
                                              const PercentileAnchors& anchors, int lookback_days,
                                              int lookahead_days) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  // per-year day intervals [season block - lookback, season block + lookahead]
  std::vector<std::pair<std::int32_t, std::int32_t>> windows;
  for (int y = anchors.year_min; y <= anchors.year_max; ++y) {
    std::int32_t first = 0, last = 0;
    bool open = false;
    for (unsigned m = 1; m <= 12; ++m) {
      if (!anchors.season_months.count(m)) {
        if (open) {
          windows.push_back({first - lookback_days, last + lookahead_days});
          open = false;
        }
        continue;
      }
      const Date start = *Date::make(y, m, 1);
      Date end = start;
      while ((end + 1).month() == m) end = end + 1;
      if (!open) {
        first = start.days;
        open = true;
      }
      last = end.days;
    }
    if (open) windows.push_back({first - lookback_days, last + lookahead_days});
  }
  auto in_window = [&](std::int32_t day) {
    for (const auto& [a, b] : windows)
      if (day >= a && day <= b) return true;
    return false;
  };
  auto scan = [&](const ExposureSeries::DayMap& days) {
    for (const auto& [day, value] : days) {
      if (!in_window(day)) continue;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
  };
  for (const auto& [tract, days] : series.tracts()) {
    (void)tract;
    scan(days);
  }
  scan(series.citywide());
  if (!(lo < hi)) throw Error(Errc::NoData, "no exposure values in the analysis window");
  return {lo, hi};
}

CrossBasisSpec crossbasis_for(const AnalysisVariant& variant, const PercentileAnchors& anchors,
                              const ExposureSeries& series) {
  CrossBasisSpec spec;
  // boundaries span the exposure values this variant's strata can reach;
  // widen a hair when the knot would sit on a boundary (degenerate
  // single-value series)
  const int tiling = variant.referent == ReferentKind::Fixed28Day ? 28 : 0;
  auto [lo, hi] =
      touched_value_range(series, anchors, variant.max_lag + tiling, tiling);
  if (!(lo < anchors.p50)) lo = anchors.p50 - 1.0;
  if (!(hi > anchors.p50)) hi = anchors.p50 + 1.0;
  spec.exposure = BasisSpec{BasisKind::BSpline, variant.exposure_degree, {anchors.p50}, lo, hi, false};
  spec.max_lag = variant.max_lag;
  spec.lag = BasisSpec{BasisKind::NaturalCubic, 3, log_lag_knots(variant.max_lag, variant.lag_knots),
                       0.0, static_cast<double>(variant.max_lag), false};
  return spec;
}

std::vector<Stratum> build_strata(const std::vector<VisitRecord>& visits,
                                  const ExposureSeries& series, const ReferentScheme& scheme,
                                  const CrossBasis& cb, const std::set<Date>& holidays,
                                  MissingTractPolicy policy, StrataBuildStats* stats) {
  const int max_lag = cb.spec().max_lag;
  const std::size_t dim = cb.n_cols() + 1;  // + holiday indicator
  std::vector<Stratum> strata;
  StrataBuildStats local;

  std::vector<double> temps(max_lag + 1);
  for (const VisitRecord& v : visits) {
    ++local.visits_total;

    const bool have_tract = !v.tract_id.empty() && series.has_tract(v.tract_id);
    const std::string* tract = have_tract ? &v.tract_id : nullptr;
    if (!tract && policy == MissingTractPolicy::Exclude) {
      ++local.dropped_missing_tract;
      continue;
    }

    std::vector<Date> members;
    try {
      members = select_referents(v.date, scheme);
    } catch (const Error&) {
      ++local.dropped_no_controls;
      continue;
    }
    members.push_back(v.date);
    std::sort(members.begin(), members.end());

    Stratum s;
    s.rows = la::Matrix(members.size(), dim);
    s.stratum_id = v.visit_id;
    bool missing = false;
    for (std::size_t j = 0; j < members.size() && !missing; ++j) {
      if (members[j] == v.date) s.case_index = j;
      for (int l = 0; l <= max_lag; ++l) {
        const Date day = members[j] - l;
        const std::optional<double> t =
            tract ? series.tract_tmax(*tract, day) : series.citywide_tmax(day);
        if (!t) {
          missing = true;
          break;
        }
        temps[l] = *t;
      }
      if (missing) break;
      cb.row(temps, s.rows.row(j));
      s.rows(j, dim - 1) = holidays.count(members[j]) ? 1.0 : 0.0;
    }
    if (missing) {
      ++local.dropped_missing_exposure;
      continue;
    }
    strata.push_back(std::move(s));
    ++local.strata_built;
  }

  if (stats) *stats = local;
  return strata;
}

namespace {

StageTwoResult fit_one_code(const std::string& code, const std::vector<VisitRecord>& code_visits,
                            const ExposureSeries& series, const PercentileAnchors& anchors,
                            const std::set<Date>& holidays, const AnalysisVariant& variant,
                            const StageTwoSettings& settings, const CrossBasis& cb) {
  StageTwoResult res;
  res.code = code;
  res.variant = variant.name;

  ReferentScheme scheme{variant.referent, *anchors.season_months.begin()};
  StrataBuildStats stats;
  std::vector<Stratum> strata =
      build_strata(code_visits, series, scheme, cb, holidays, settings.missing_tract, &stats);
  res.n_strata = stats.strata_built;
  res.n_dropped_strata = stats.visits_total - stats.strata_built;

  try {
    ClogitFit fit = fit_clogit(strata, settings.tol, settings.max_iter);
    res.n_dropped_strata += static_cast<long long>(fit.n_strata_dropped);
    res.n_strata -= static_cast<long long>(fit.n_strata_dropped);

    // stability over the cross-basis block only (the holiday column is a
    // nuisance covariate)
    std::vector<std::size_t> cb_cols;
    std::vector<bool> aliased(fit.beta.size(), false);
    for (std::size_t a : fit.aliased_columns) aliased[a] = true;
    for (std::size_t j = 0; j + 1 < fit.beta.size(); ++j)
      if (!aliased[j]) cb_cols.push_back(j);
    res.stability = stability_check(fit, cb_cols);

    const double target = anchors.p95;
    const double ref = variant.ref_percentile == 0.70 ? anchors.p70 : anchors.p50;
    res.estimates =
        predict_or(cb, fit.beta, fit.cov, target, ref, default_contrasts(variant.max_lag));
    res.significant = significant_lag0(res.estimates);
    res.fit_ok = true;
  } catch (const Error& e) {
    res.fit_ok = false;
    res.fail_reason = errc_name(e.code());
  }
  return res;
}

}  // namespace

std::vector<StageTwoResult> run_stage2(const std::vector<std::string>& codes,
                                       const std::vector<VisitRecord>& visits,
                                       const ExposureSeries& series,
                                       const PercentileAnchors& anchors,
                                       const std::set<Date>& holidays,
                                       const AnalysisVariant& variant,
                                       const StageTwoSettings& settings) {
  const CrossBasis cb(crossbasis_for(variant, anchors, series));

  // per-code visit subsets, one pass
  std::map<std::string, std::vector<VisitRecord>> by_code;
  for (const std::string& c : codes) by_code[c];
  for (const VisitRecord& v : visits)
    for (const std::string& c : v.codes) {
      auto it = by_code.find(c);
      if (it != by_code.end()) it->second.push_back(v);
    }

  std::vector<StageTwoResult> results(codes.size());
  parallel_for_index(codes.size(), settings.workers, [&](std::size_t i) {
    results[i] = fit_one_code(codes[i], by_code.at(codes[i]), series, anchors, holidays, variant,
                              settings, cb);
  });
  return results;
}

const char* strat_var_name(StratVar v) {
  switch (v) {
    case StratVar::SexVar: return "sex";
    case StratVar::AgeGroup: return "age_group";
    case StratVar::RaceEthnicity: return "race_ethnicity";
    case StratVar::RegionVar: return "region";
  }
  return "?";
}

std::string stratum_label(const VisitRecord& v, StratVar var) {
  switch (var) {
    case StratVar::SexVar:
      return to_token(v.sex);
    case StratVar::AgeGroup: {
      if (!v.has_age()) return "";
      if (v.age_years <= 24) return "18-24";
      if (v.age_years <= 44) return "25-44";
      if (v.age_years <= 64) return "45-64";
      return "65+";
    }
    case StratVar::RaceEthnicity:
      return to_token(v.race);
    case StratVar::RegionVar:
      return to_token(v.region);
  }
  return "";
}

std::vector<std::string> stratum_levels(StratVar var) {
  switch (var) {
    case StratVar::SexVar: return {"Female", "Male", "Other"};
    case StratVar::AgeGroup: return {"18-24", "25-44", "45-64", "65+"};
    case StratVar::RaceEthnicity: return {"Asian", "BlackOrAfricanAmerican", "White", "Other"};
    case StratVar::RegionVar:
      return {"Central", "North", "Northwest", "South", "Southwest", "FarSouth", "West"};
  }
  return {};
}

std::vector<StratifiedResult> run_stratified(const std::vector<std::string>& codes,
                                             const std::vector<VisitRecord>& visits,
                                             const ExposureSeries& series,
                                             const PercentileAnchors& anchors,
                                             const std::set<Date>& holidays,
                                             const AnalysisVariant& variant,
                                             const StageTwoSettings& settings, StratVar var,
                                             const ScreenSettings* rescreen) {
  std::vector<StratifiedResult> out;
  for (const std::string& level : stratum_levels(var)) {
    std::vector<VisitRecord> subset;
    for (const VisitRecord& v : visits)
      if (stratum_label(v, var) == level) subset.push_back(v);

    std::vector<std::string> level_codes = codes;
    if (rescreen) {
      level_codes.clear();
      if (!subset.empty())
        for (const ScreeningRow& r : screen(subset, series, anchors, holidays, *rescreen))
          if (r.retained) level_codes.push_back(r.code);
      std::sort(level_codes.begin(), level_codes.end());
    }

    const auto results =
        run_stage2(level_codes, subset, series, anchors, holidays, variant, settings);
    for (const StageTwoResult& r : results)
      out.push_back({strat_var_name(var), level, r});
  }
  return out;
}

std::vector<SensitivityDiff> sensitivity_diff(
    const std::vector<StageTwoResult>& primary,
    const std::map<std::string, std::vector<StageTwoResult>>& variants) {
  std::set<std::string> primary_sig;
  for (const auto& r : primary)
    if (r.fit_ok && r.significant) primary_sig.insert(r.code);

  std::vector<SensitivityDiff> diffs;
  for (const auto& [name, results] : variants) {
    std::set<std::string> sig;
    for (const auto& r : results)
      if (r.fit_ok && r.significant) sig.insert(r.code);

    SensitivityDiff d;
    d.variant = name;
    std::set_difference(primary_sig.begin(), primary_sig.end(), sig.begin(), sig.end(),
                        std::back_inserter(d.dropped_from_primary));
    std::set_difference(sig.begin(), sig.end(), primary_sig.begin(), primary_sig.end(),
                        std::back_inserter(d.newly_detected));
    diffs.push_back(std::move(d));
  }
  return diffs;
}

}  // namespace hwas
