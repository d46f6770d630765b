#pragma once

#include <map>
#include <string>
#include <vector>

#include "hwas/config.hpp"
#include "hwas/crossover.hpp"
#include "hwas/screening.hpp"
#include "hwas/synth.hpp"

namespace hwas {

// Everything loaded and derived once per run.
struct LoadedInputs {
  std::vector<VisitRecord> visits;
  ParseStats parse_stats;
  ExposureSeries series;
  PercentileAnchors anchors;
  std::set<Date> holidays;
  std::map<std::string, std::string> descriptions;  // optional code -> text
  std::map<std::string, std::string> input_digests;
};

LoadedInputs load_inputs(const RunConfig& config);

struct PipelineResult {
  std::vector<ScreeningRow> screening;
  std::vector<std::string> retained_codes;
  // variant name -> per-code results (primary is always present)
  std::map<std::string, std::vector<StageTwoResult>> stage2;
  std::vector<StratifiedResult> stratified;
  std::vector<SensitivityDiff> sensitivity;
};

// ingest -> exposure -> screen -> stage 2 (every configured variant) ->
// stratified (primary spec) -> sensitivity diff. Writes all output files
// plus run_metadata.json under out_dir.
PipelineResult run_pipeline(const RunConfig& config, const LoadedInputs& inputs,
                            const std::string& out_dir);

// Individual stage writers (shared by the subcommands).
void write_screening_outputs(const std::vector<ScreeningRow>& rows,
                             const std::map<std::string, std::string>& descriptions,
                             const std::string& out_dir, const std::string& config_hash);
void write_dlnm_results(const std::map<std::string, std::vector<StageTwoResult>>& by_variant,
                        const std::string& out_dir, const std::string& config_hash);
void write_stratified_results(const std::vector<StratifiedResult>& rows,
                              const std::string& out_dir, const std::string& config_hash);
void write_sensitivity_results(const std::vector<SensitivityDiff>& diffs,
                               const std::string& out_dir, const std::string& config_hash);
void write_run_metadata(const RunConfig& config, const LoadedInputs& inputs,
                        const PipelineResult& result, const std::string& out_dir);

// Reads retained codes back from a screening_results.csv (subcommand
// chaining); verifies the embedded config hash when expected_hash is given.
std::vector<std::string> read_retained_codes(const std::string& screening_csv,
                                             const std::string& expected_hash = "");

}  // namespace hwas
