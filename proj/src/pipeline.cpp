#include "hwas/pipeline.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "hwas/csv.hpp"
#include "hwas/errors.hpp"

namespace hwas {

using nlohmann::json;

namespace {

std::map<std::string, std::string> load_descriptions(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  CsvReader reader(path);
  const int cc = reader.col("code");
  const int cd = reader.col("description");
  if (cc < 0 || cd < 0)
    throw Error(Errc::InvalidInput, path + ": need columns code,description");
  std::vector<std::string> f;
  while (reader.next(f)) out[f[cc]] = f[cd];
  return out;
}

std::string bool01(bool b) { return b ? "1" : "0"; }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

LoadedInputs load_inputs(const RunConfig& config) {
  LoadedInputs in;

  if (config.visits_path.empty()) throw Error(Errc::InvalidInput, "config: inputs.visits missing");
  if (config.holidays_path.empty())
    throw Error(Errc::InvalidInput, "config: inputs.holidays missing");

  GemTable gem;
  const GemTable* gem_ptr = nullptr;
  if (!config.gem_path.empty()) {
    gem = GemTable::load(config.gem_path);
    gem_ptr = &gem;
    in.input_digests["gem"] = hex64(fnv1a64_file(config.gem_path));
  }

  StudyFilter filter;
  filter.season_months = config.season_months;
  filter.year_min = config.year_min;
  filter.year_max = config.year_max;
  filter.min_age = config.min_age;
  filter.keep_missing_age = config.keep_missing_age;

  ParsedVisits parsed = parse_visits(config.visits_path, gem_ptr, filter);
  in.visits = std::move(parsed.records);
  in.parse_stats = parsed.stats;
  in.input_digests["visits"] = hex64(fnv1a64_file(config.visits_path));

  if (!config.temperature_path.empty()) {
    in.series = load_temperature_csv(config.temperature_path);
    in.input_digests["temperature"] = hex64(fnv1a64_file(config.temperature_path));
  } else if (!config.grid_path.empty() && !config.membership_path.empty()) {
    in.series = link_grid_to_tracts(load_grid_csv(config.grid_path),
                                    load_membership_csv(config.membership_path));
    in.input_digests["grid"] = hex64(fnv1a64_file(config.grid_path));
    in.input_digests["membership"] = hex64(fnv1a64_file(config.membership_path));
  } else {
    throw Error(Errc::InvalidInput, "config: need inputs.temperature or inputs.grid+membership");
  }

  const auto gaps = in.series.contiguity_issues();
  if (!gaps.empty()) throw Error(Errc::InvalidInput, "temperature series has gaps: " + gaps[0]);

  in.holidays = load_holidays(config.holidays_path);
  in.input_digests["holidays"] = hex64(fnv1a64_file(config.holidays_path));

  in.anchors =
      percentile_anchors(in.series, config.season_months, config.year_min, config.year_max);
  in.descriptions = load_descriptions(config.descriptions_path);
  if (!config.descriptions_path.empty())
    in.input_digests["descriptions"] = hex64(fnv1a64_file(config.descriptions_path));
  return in;
}

void write_screening_outputs(const std::vector<ScreeningRow>& rows,
                             const std::map<std::string, std::string>& descriptions,
                             const std::string& out_dir, const std::string& config_hash) {
  const std::string comment = "config_hash=" + config_hash;
  CsvWriter w(out_dir + "/screening_results.csv",
              {"code", "description", "irr", "ci_low", "ci_high", "raw_p", "adj_p", "count",
               "rel_freq", "crit_slope", "crit_freq", "crit_count", "retained"},
              comment);
  for (const ScreeningRow& r : rows) {
    auto d = descriptions.find(r.code);
    w.row({r.code, d == descriptions.end() ? "" : d->second, fmt_g6(r.irr), fmt_g6(r.ci_low),
           fmt_g6(r.ci_high), fmt_g6(r.raw_p), fmt_g6(r.adj_p), fmt_int(r.total_count),
           fmt_g6(r.rel_freq_above_p70), bool01(r.crit_slope), bool01(r.crit_freq),
           bool01(r.crit_count), bool01(r.retained)});
  }
  w.close();

  CsvWriter m(out_dir + "/manhattan.csv", {"code", "chapter", "neg_log10_adj_p", "retained"},
              comment);
  for (const ScreeningRow& r : rows) {
    const double nl = r.adj_p > 0.0 ? -std::log10(r.adj_p) : HUGE_VAL;
    m.row({r.code, std::string(1, r.code.empty() ? '?' : r.code[0]), fmt_g6(nl),
           bool01(r.retained)});
  }
  m.close();
}

void write_dlnm_results(const std::map<std::string, std::vector<StageTwoResult>>& by_variant,
                        const std::string& out_dir, const std::string& config_hash) {
  CsvWriter w(out_dir + "/dlnm_results.csv",
              {"code", "variant", "contrast", "or_point", "ci_low", "ci_high", "n_strata",
               "n_dropped_strata", "stable", "significant"},
              "config_hash=" + config_hash);
  for (const auto& [slot, results] : by_variant) {
    (void)slot;  // rows carry the classified variant label
    for (const StageTwoResult& r : results) {
      if (!r.fit_ok) {
        w.row({r.code, r.variant, "error:" + r.fail_reason, "nan", "nan", "nan",
               fmt_int(r.n_strata), fmt_int(r.n_dropped_strata), "0", "0"});
        continue;
      }
      for (const EffectEstimate& e : r.estimates)
        w.row({r.code, r.variant, e.contrast, fmt_g6(e.point), fmt_g6(e.ci_low), fmt_g6(e.ci_high),
               fmt_int(r.n_strata), fmt_int(r.n_dropped_strata), bool01(r.stability.is_stable()),
               bool01(r.significant)});
    }
  }
  w.close();
}

void write_stratified_results(const std::vector<StratifiedResult>& rows,
                              const std::string& out_dir, const std::string& config_hash) {
  CsvWriter w(out_dir + "/stratified_results.csv",
              {"code", "variant", "contrast", "or_point", "ci_low", "ci_high", "n_strata",
               "n_dropped_strata", "stable", "significant", "strat_var", "stratum",
               "stability_reason"},
              "config_hash=" + config_hash);
  for (const StratifiedResult& s : rows) {
    const StageTwoResult& r = s.result;
    if (!r.fit_ok) {
      w.row({r.code, r.variant, "error:" + r.fail_reason, "nan", "nan", "nan", fmt_int(r.n_strata),
             fmt_int(r.n_dropped_strata), "0", "0", s.strat_var, s.stratum, r.fail_reason});
      continue;
    }
    for (const EffectEstimate& e : r.estimates)
      w.row({r.code, r.variant, e.contrast, fmt_g6(e.point), fmt_g6(e.ci_low), fmt_g6(e.ci_high),
             fmt_int(r.n_strata), fmt_int(r.n_dropped_strata), bool01(r.stability.is_stable()),
             bool01(r.significant), s.strat_var, s.stratum, r.stability.reason()});
  }
  w.close();
}

void write_sensitivity_results(const std::vector<SensitivityDiff>& diffs,
                               const std::string& out_dir, const std::string& config_hash) {
  CsvWriter w(out_dir + "/sensitivity_results.csv", {"variant", "dropped_codes", "new_codes"},
              "config_hash=" + config_hash);
  for (const SensitivityDiff& d : diffs)
    w.row({d.variant, join(d.dropped_from_primary, ";"), join(d.newly_detected, ";")});
  w.close();
}

void write_run_metadata(const RunConfig& config, const LoadedInputs& inputs,
                        const PipelineResult& result, const std::string& out_dir) {
  json meta;
  meta["config"] = json::parse(config.canonical_json());
  meta["config_hash"] = config.hash();
  meta["input_digests"] = inputs.input_digests;
  meta["anchors"] = {{"p50", inputs.anchors.p50},
                     {"p70", inputs.anchors.p70},
                     {"p95", inputs.anchors.p95}};
  meta["parse_stats"] = {{"rows_total", inputs.parse_stats.rows_total},
                         {"rows_kept", inputs.parse_stats.rows_kept},
                         {"malformed_rows", inputs.parse_stats.malformed_rows},
                         {"out_of_season", inputs.parse_stats.out_of_season},
                         {"out_of_years", inputs.parse_stats.out_of_years},
                         {"under_age", inputs.parse_stats.under_age},
                         {"missing_age_dropped", inputs.parse_stats.missing_age_dropped},
                         {"duplicate_conflicts", inputs.parse_stats.duplicate_conflicts},
                         {"unmappable_codes", inputs.parse_stats.unmappable_codes},
                         {"invalid_codes", inputs.parse_stats.invalid_codes},
                         {"visits", inputs.parse_stats.visits}};
  meta["screening_family_size"] = result.screening.size();
  meta["retained_codes"] = result.retained_codes;
  meta["exposure"] = {{"n_tracts", inputs.series.n_tracts()},
                      {"min_value", inputs.series.min_value()},
                      {"max_value", inputs.series.max_value()},
                      {"min_date", inputs.series.min_date().str()},
                      {"max_date", inputs.series.max_date().str()}};

  json failures = json::object();
  for (const auto& [variant, results] : result.stage2) {
    json per = json::array();
    for (const StageTwoResult& r : results)
      if (!r.fit_ok) per.push_back(r.code + ":" + r.fail_reason);
    failures[variant] = per;
  }
  meta["stage2_failures"] = failures;

  meta["decisions"] = {
      {"percentile_estimator", "order-statistic linear interpolation, h = (n-1)q + 1"},
      {"citywide_aggregation", "unweighted mean over tracts with data"},
      {"extreme_rule", config.extreme_strict ? "tmax > p95" : "tmax >= p95"},
      {"hot_day_rule", "tmax > p70, proportion >= threshold"},
      {"missing_tract_policy",
       config.missing_tract == MissingTractPolicy::Exclude ? "exclude" : "citywide"},
      {"bh_family", "all codes with at least one in-season visit"},
      {"exposure_basis_boundaries", "min/max over all series values"},
      {"fixed28_epoch", "first in-season Monday of the case's year"},
      {"stage2_code_list", config.stratified_rescreen ? "stage 1 rescreened within each stratum"
                                                       : "pooled stage-1 retained codes"},
      {"missing_age", config.keep_missing_age ? "kept overall, excluded from age strata"
                                              : "dropped at parse"}};

  std::ofstream out(out_dir + "/run_metadata.json");
  if (!out) throw Error(Errc::InvalidInput, "cannot write run_metadata.json under " + out_dir);
  out << meta.dump(2) << "\n";
}

PipelineResult run_pipeline(const RunConfig& config, const LoadedInputs& inputs,
                            const std::string& out_dir) {
  PipelineResult result;
  const std::string config_hash = config.hash();

  ScreenSettings screen_settings;
  screen_settings.alpha = config.alpha;
  screen_settings.min_count = config.min_count;
  screen_settings.min_rel_freq = config.min_rel_freq;
  screen_settings.workers = config.workers;

  result.screening =
      screen(inputs.visits, inputs.series, inputs.anchors, inputs.holidays, screen_settings);
  for (const ScreeningRow& r : result.screening)
    if (r.retained) result.retained_codes.push_back(r.code);
  write_screening_outputs(result.screening, inputs.descriptions, out_dir, config_hash);

  StageTwoSettings s2;
  s2.missing_tract = config.missing_tract;
  s2.workers = config.workers;

  // each configured variant; the 'primary' slot honors any custom model
  // fields from the config and reports under its classified label (a config
  // whose reference percentile is 0.70 labels its output sens_i)
  for (const std::string& name : config.variants) {
    const AnalysisVariant variant =
        name == "primary" ? config.primary_variant() : make_variant(name);
    result.stage2[name] = run_stage2(result.retained_codes, inputs.visits, inputs.series,
                                     inputs.anchors, inputs.holidays, variant, s2);
  }
  if (!result.stage2.count("primary"))
    result.stage2["primary"] = run_stage2(result.retained_codes, inputs.visits, inputs.series,
                                          inputs.anchors, inputs.holidays,
                                          config.primary_variant(), s2);
  write_dlnm_results(result.stage2, out_dir, config_hash);

  const AnalysisVariant primary = config.primary_variant();
  for (StratVar var : {StratVar::SexVar, StratVar::AgeGroup, StratVar::RaceEthnicity,
                       StratVar::RegionVar}) {
    auto rows = run_stratified(result.retained_codes, inputs.visits, inputs.series, inputs.anchors,
                               inputs.holidays, primary, s2, var,
                               config.stratified_rescreen ? &screen_settings : nullptr);
    result.stratified.insert(result.stratified.end(), rows.begin(), rows.end());
  }
  write_stratified_results(result.stratified, out_dir, config_hash);

  std::map<std::string, std::vector<StageTwoResult>> others;
  for (const auto& [name, res] : result.stage2)
    if (name != "primary") others[name] = res;
  result.sensitivity = sensitivity_diff(result.stage2.at("primary"), others);
  write_sensitivity_results(result.sensitivity, out_dir, config_hash);

  write_run_metadata(config, inputs, result, out_dir);
  return result;
}

std::vector<std::string> read_retained_codes(const std::string& screening_csv,
                                             const std::string& expected_hash) {
  CsvReader reader(screening_csv);
  if (!expected_hash.empty()) {
    bool ok = false;
    for (const std::string& line : reader.preamble())
      if (line.find("config_hash=" + expected_hash) != std::string::npos) ok = true;
    if (!ok)
      throw Error(Errc::InvalidInput,
                  screening_csv + ": config hash mismatch (stale stage-1 output?)");
  }
  const int cc = reader.col("code");
  const int cr = reader.col("retained");
  if (cc < 0 || cr < 0)
    throw Error(Errc::InvalidInput, screening_csv + ": need columns code,retained");
  std::vector<std::string> codes;
  std::vector<std::string> f;
  while (reader.next(f))
    if (f[cr] == "1") codes.push_back(f[cc]);
  std::sort(codes.begin(), codes.end());
  return codes;
}

}  // namespace hwas
