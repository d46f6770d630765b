// hwas: two-stage screening of acute-care diagnosis counts against daily
// maximum temperature. Subcommands cover the individual stages plus the
// whole pipeline and the synthetic-data generator used for verification.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "hwas/config.hpp"
#include "hwas/csv.hpp"
#include "hwas/errors.hpp"
#include "hwas/kern/kernels.hpp"
#include "hwas/pipeline.hpp"
#include "hwas/synth.hpp"

namespace fs = std::filesystem;
using namespace hwas;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string variant;
  std::string scenario_path;
  unsigned workers = 0;  // 0 = keep config value
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load_config(const CliOptions& opt) {
  if (opt.config_path.empty()) throw Error(Errc::InvalidInput, "--config is required");
  RunConfig c = RunConfig::load(opt.config_path);
  if (opt.workers > 0) c.workers = opt.workers;
  if (opt.seed_set) c.seed = opt.seed;
  return c;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::InvalidInput, "cannot create output directory " + dir);
}

int cmd_ingest_check(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  const LoadedInputs in = load_inputs(config);
  const ParseStats& st = in.parse_stats;
  std::printf("visits: %lld (from %lld rows)\n", st.visits, st.rows_total);
  std::printf("dropped rows: malformed=%lld out_of_season=%lld out_of_years=%lld under_age=%lld "
              "missing_age=%lld duplicate_conflicts=%lld\n",
              st.malformed_rows, st.out_of_season, st.out_of_years, st.under_age,
              st.missing_age_dropped, st.duplicate_conflicts);
  std::printf("dropped codes: unmappable=%lld invalid=%lld\n", st.unmappable_codes,
              st.invalid_codes);
  std::printf("distinct categories: %zu\n", distinct_categories(in.visits));
  std::printf("anchors: p50=%.4f p70=%.4f p95=%.4f\n", in.anchors.p50, in.anchors.p70,
              in.anchors.p95);

  long long extreme = 0, season_days = 0;
  for (Date d : season_calendar(in.series, config.season_months, config.year_min, config.year_max)) {
    ++season_days;
    extreme += is_extreme(d, in.series, in.anchors, config.extreme_strict) ? 1 : 0;
  }
  std::printf("extreme heat days: %lld of %lld in season (%s p95)\n", extreme, season_days,
              config.extreme_strict ? ">" : ">=");
  return 0;
}

int cmd_link_temperature(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  if (config.grid_path.empty() || config.membership_path.empty())
    throw Error(Errc::InvalidInput, "link-temperature needs inputs.grid and inputs.membership");
  ensure_out_dir(opt.out_dir);
  const ExposureSeries series =
      link_grid_to_tracts(load_grid_csv(config.grid_path), load_membership_csv(config.membership_path));

  CsvWriter w(opt.out_dir + "/temperature.csv", {"date", "tract_id", "tmax_c"},
              "config_hash=" + config.hash());
  for (const auto& [tract, days] : series.tracts()) {
    std::vector<std::int32_t> sorted;
    for (const auto& [day, value] : days) {
      (void)value;
      sorted.push_back(day);
    }
    std::sort(sorted.begin(), sorted.end());
    for (std::int32_t day : sorted)
      w.row({Date{day}.str(), tract, fmt_g6(days.at(day))});
  }
  w.close();
  std::printf("linked %zu tracts into %s/temperature.csv\n", series.n_tracts(),
              opt.out_dir.c_str());
  return 0;
}

int cmd_screen(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  ensure_out_dir(opt.out_dir);
  const LoadedInputs in = load_inputs(config);

  ScreenSettings settings;
  settings.alpha = config.alpha;
  settings.min_count = config.min_count;
  settings.min_rel_freq = config.min_rel_freq;
  settings.workers = config.workers;
  const auto rows = screen(in.visits, in.series, in.anchors, in.holidays, settings);
  write_screening_outputs(rows, in.descriptions, opt.out_dir, config.hash());

  long long retained = 0;
  for (const auto& r : rows) retained += r.retained ? 1 : 0;
  std::printf("screened %zu codes, retained %lld\n", rows.size(), retained);
  return 0;
}

int cmd_stage2(const CliOptions& opt) {
  RunConfig config = load_config(opt);
  ensure_out_dir(opt.out_dir);
  const LoadedInputs in = load_inputs(config);
  const auto codes = read_retained_codes(opt.out_dir + "/screening_results.csv", config.hash());

  StageTwoSettings settings;
  settings.missing_tract = config.missing_tract;
  settings.workers = config.workers;

  std::vector<std::string> names =
      opt.variant.empty() ? config.variants : std::vector<std::string>{opt.variant};
  std::map<std::string, std::vector<StageTwoResult>> by_variant;
  for (const std::string& name : names) {
    const AnalysisVariant variant =
        name == "primary" ? config.primary_variant() : make_variant(name);
    by_variant[name] =
        run_stage2(codes, in.visits, in.series, in.anchors, in.holidays, variant, settings);
  }
  write_dlnm_results(by_variant, opt.out_dir, config.hash());
  std::printf("stage 2 done for %zu codes x %zu variants\n", codes.size(), names.size());
  return 0;
}

int cmd_stratified(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  ensure_out_dir(opt.out_dir);
  const LoadedInputs in = load_inputs(config);
  const auto codes = read_retained_codes(opt.out_dir + "/screening_results.csv", config.hash());

  StageTwoSettings settings;
  settings.missing_tract = config.missing_tract;
  settings.workers = config.workers;
  const AnalysisVariant primary = config.primary_variant();

  ScreenSettings rescreen;
  rescreen.alpha = config.alpha;
  rescreen.min_count = config.min_count;
  rescreen.min_rel_freq = config.min_rel_freq;
  rescreen.workers = config.workers;

  std::vector<StratifiedResult> rows;
  for (StratVar var :
       {StratVar::SexVar, StratVar::AgeGroup, StratVar::RaceEthnicity, StratVar::RegionVar}) {
    auto part = run_stratified(codes, in.visits, in.series, in.anchors, in.holidays, primary,
                               settings, var, config.stratified_rescreen ? &rescreen : nullptr);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_stratified_results(rows, opt.out_dir, config.hash());
  std::printf("stratified results for %zu codes\n", codes.size());
  return 0;
}

int cmd_sensitivity(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  ensure_out_dir(opt.out_dir);
  const LoadedInputs in = load_inputs(config);
  const auto codes = read_retained_codes(opt.out_dir + "/screening_results.csv", config.hash());

  StageTwoSettings settings;
  settings.missing_tract = config.missing_tract;
  settings.workers = config.workers;

  std::map<std::string, std::vector<StageTwoResult>> by_variant;
  for (const std::string& name : config.variants) {
    const AnalysisVariant variant =
        name == "primary" ? config.primary_variant() : make_variant(name);
    by_variant[name] =
        run_stage2(codes, in.visits, in.series, in.anchors, in.holidays, variant, settings);
  }
  if (!by_variant.count("primary"))
    by_variant["primary"] = run_stage2(codes, in.visits, in.series, in.anchors, in.holidays,
                                       config.primary_variant(), settings);
  std::map<std::string, std::vector<StageTwoResult>> others;
  for (const auto& [name, res] : by_variant)
    if (name != "primary") others[name] = res;
  write_dlnm_results(by_variant, opt.out_dir, config.hash());
  write_sensitivity_results(sensitivity_diff(by_variant.at("primary"), others), opt.out_dir,
                            config.hash());
  std::printf("sensitivity comparison across %zu variants\n", others.size());
  return 0;
}

int cmd_pipeline(const CliOptions& opt) {
  const RunConfig config = load_config(opt);
  ensure_out_dir(opt.out_dir);
  const LoadedInputs in = load_inputs(config);
  const PipelineResult result = run_pipeline(config, in, opt.out_dir);
  std::printf("pipeline complete: %zu codes screened, %zu retained, outputs in %s\n",
              result.screening.size(), result.retained_codes.size(), opt.out_dir.c_str());
  return 0;
}

int cmd_synth(const CliOptions& opt) {
  if (opt.scenario_path.empty()) throw Error(Errc::InvalidInput, "--scenario is required");
  SynthScenario scenario = SynthScenario::load(opt.scenario_path);
  if (opt.seed_set) scenario.seed = opt.seed;
  ensure_out_dir(opt.out_dir);
  const SynthOutput out = generate_synthetic(scenario, opt.out_dir);
  std::printf("synthetic bundle in %s: %lld visits, anchors p50=%.4f p70=%.4f p95=%.4f\n",
              opt.out_dir.c_str(), out.n_visits, out.anchors.p50, out.anchors.p70,
              out.anchors.p95);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heat-wide association scan of acute-care visit counts"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->envname("HWAS_CONFIG");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--workers", opt.workers, "worker threads (overrides config)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "RNG seed (synth only)");
  app.add_option(
      "--kernels",
      [](const std::vector<std::string>& v) {
        try {
          kern::force_backend(v.front());
          return true;
        } catch (const std::exception&) {
          return false;
        }
      },
      "kernel backend: auto|scalar|avx2|neon (available: " + kern::available_backends() + ")");

  auto* ingest_cmd = app.add_subcommand("ingest-check", "parse inputs and report drop counts");
  auto* link_cmd = app.add_subcommand("link-temperature", "average grid cells into tract series");
  auto* screen_cmd = app.add_subcommand("screen", "stage-1 quasi-Poisson screen");
  auto* stage2_cmd = app.add_subcommand("stage2", "stage-2 DLNM case-crossover fits");
  stage2_cmd->add_option("--variant", opt.variant, "one analysis variant (default: all configured)");
  auto* strat_cmd = app.add_subcommand("stratified", "subgroup re-fits of the primary model");
  auto* sens_cmd = app.add_subcommand("sensitivity", "variant comparison against the primary");
  auto* pipe_cmd = app.add_subcommand("pipeline", "full two-stage run with all outputs");
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic input bundle");
  synth_cmd->add_option("--scenario", opt.scenario_path, "scenario JSON");

  // top-level flags stay usable after the subcommand name
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // bad flags are input validation failures
  }
  opt.seed_set = seed_opt->count() > 0;

  try {
    if (ingest_cmd->parsed()) return cmd_ingest_check(opt);
    if (link_cmd->parsed()) return cmd_link_temperature(opt);
    if (screen_cmd->parsed()) return cmd_screen(opt);
    if (stage2_cmd->parsed()) return cmd_stage2(opt);
    if (strat_cmd->parsed()) return cmd_stratified(opt);
    if (sens_cmd->parsed()) return cmd_sensitivity(opt);
    if (pipe_cmd->parsed()) return cmd_pipeline(opt);
    if (synth_cmd->parsed()) return cmd_synth(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::Internal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
