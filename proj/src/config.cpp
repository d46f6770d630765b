#include "hwas/config.hpp"

#include <fstream>

#include "json.hpp"

#include "hwas/csv.hpp"
#include "hwas/errors.hpp"

namespace hwas {

using nlohmann::json;

namespace {

ReferentKind referent_from_string(const std::string& s) {
  if (s == "month") return ReferentKind::TimeStratifiedMonth;
  if (s == "fixed28") return ReferentKind::Fixed28Day;
  throw Error(Errc::InvalidInput, "referent must be 'month' or 'fixed28', got " + s);
}

const char* referent_to_string(ReferentKind k) {
  return k == ReferentKind::TimeStratifiedMonth ? "month" : "fixed28";
}

MissingTractPolicy tract_policy_from_string(const std::string& s) {
  if (s == "exclude") return MissingTractPolicy::Exclude;
  if (s == "citywide") return MissingTractPolicy::Citywide;
  throw Error(Errc::InvalidInput, "missing_tract must be 'exclude' or 'citywide', got " + s);
}

const char* tract_policy_to_string(MissingTractPolicy p) {
  return p == MissingTractPolicy::Exclude ? "exclude" : "citywide";
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }

  RunConfig c;
  try {
    if (j.contains("season_months")) {
      c.season_months.clear();
      for (auto m : j.at("season_months")) c.season_months.insert(m.get<unsigned>());
    }
    c.year_min = j.value("year_min", c.year_min);
    c.year_max = j.value("year_max", c.year_max);
    c.target_percentile = j.value("target_percentile", c.target_percentile);
    c.ref_percentile = j.value("ref_percentile", c.ref_percentile);
    c.screen_percentile = j.value("screen_percentile", c.screen_percentile);
    c.alpha = j.value("alpha", c.alpha);
    c.min_count = j.value("min_count", c.min_count);
    c.min_rel_freq = j.value("min_rel_freq", c.min_rel_freq);
    c.max_lag = j.value("max_lag", c.max_lag);
    c.exposure_degree = j.value("exposure_degree", c.exposure_degree);
    c.lag_knots = j.value("lag_knots", c.lag_knots);
    if (j.contains("referent")) c.referent = referent_from_string(j.at("referent").get<std::string>());
    c.min_age = j.value("min_age", c.min_age);
    c.keep_missing_age = j.value("keep_missing_age", c.keep_missing_age);
    if (j.contains("missing_tract"))
      c.missing_tract = tract_policy_from_string(j.at("missing_tract").get<std::string>());
    c.extreme_strict = j.value("extreme_strict", c.extreme_strict);
    c.stratified_rescreen = j.value("stratified_rescreen", c.stratified_rescreen);
    if (j.contains("variants")) {
      c.variants.clear();
      for (auto v : j.at("variants")) c.variants.push_back(v.get<std::string>());
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);

    if (j.contains("inputs")) {
      const json& in_j = j.at("inputs");
      c.visits_path = in_j.value("visits", "");
      c.temperature_path = in_j.value("temperature", "");
      c.grid_path = in_j.value("grid", "");
      c.membership_path = in_j.value("membership", "");
      c.holidays_path = in_j.value("holidays", "");
      c.gem_path = in_j.value("gem", "");
      c.descriptions_path = in_j.value("descriptions", "");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }
  c.validate();
  return c;
}

std::string RunConfig::canonical_json() const {
  json j;
  j["season_months"] = std::vector<unsigned>(season_months.begin(), season_months.end());
  j["year_min"] = year_min;
  j["year_max"] = year_max;
  j["target_percentile"] = target_percentile;
  j["ref_percentile"] = ref_percentile;
  j["screen_percentile"] = screen_percentile;
  j["alpha"] = alpha;
  j["min_count"] = min_count;
  j["min_rel_freq"] = min_rel_freq;
  j["max_lag"] = max_lag;
  j["exposure_degree"] = exposure_degree;
  j["lag_knots"] = lag_knots;
  j["referent"] = referent_to_string(referent);
  j["min_age"] = min_age;
  j["keep_missing_age"] = keep_missing_age;
  j["missing_tract"] = tract_policy_to_string(missing_tract);
  j["extreme_strict"] = extreme_strict;
  j["stratified_rescreen"] = stratified_rescreen;
  j["variants"] = variants;
  j["seed"] = seed;
  j["inputs"] = {{"visits", visits_path},       {"temperature", temperature_path},
                 {"grid", grid_path},           {"membership", membership_path},
                 {"holidays", holidays_path},   {"gem", gem_path},
                 {"descriptions", descriptions_path}};
  // workers deliberately excluded: the worker count never changes results
  return j.dump();
}

std::string RunConfig::hash() const {
  const std::string canon = canonical_json();
  return hex64(fnv1a64(canon.data(), canon.size()));
}

AnalysisVariant RunConfig::primary_variant() const {
  AnalysisVariant v;
  v.name = classify_variant();
  v.ref_percentile = ref_percentile;
  v.target_percentile = target_percentile;
  v.exposure_degree = exposure_degree;
  v.max_lag = max_lag;
  v.lag_knots = lag_knots;
  v.referent = referent;
  return v;
}

std::string RunConfig::classify_variant() const {
  for (const std::string& name : all_variant_names()) {
    const AnalysisVariant v = make_variant(name);
    if (v.ref_percentile == ref_percentile && v.target_percentile == target_percentile &&
        v.exposure_degree == exposure_degree && v.max_lag == max_lag &&
        v.lag_knots == lag_knots && v.referent == referent)
      return name;
  }
  return "custom";
}

void RunConfig::validate() const {
  if (season_months.empty()) throw Error(Errc::InvalidInput, "season_months empty");
  for (unsigned m : season_months)
    if (m < 1 || m > 12) throw Error(Errc::InvalidInput, "season month outside 1..12");
  if (year_min > year_max) throw Error(Errc::InvalidInput, "year_min > year_max");
  if (!(ref_percentile < target_percentile))
    throw Error(Errc::InvalidInput, "ref_percentile must be below target_percentile");
  // the anchors are the fixed 50th/70th/95th warm-season quantiles; the only
  // supported reference switch is 0.50 -> 0.70 (the sens_i variant)
  if (ref_percentile != 0.50 && ref_percentile != 0.70)
    throw Error(Errc::InvalidInput, "ref_percentile must be 0.50 or 0.70");
  if (target_percentile != 0.95)
    throw Error(Errc::InvalidInput, "target_percentile must be 0.95");
  if (screen_percentile != 0.70)
    throw Error(Errc::InvalidInput, "screen_percentile must be 0.70");
  if (alpha <= 0.0 || alpha >= 1.0) throw Error(Errc::InvalidInput, "alpha outside (0,1)");
  if (min_count < 0) throw Error(Errc::InvalidInput, "min_count negative");
  if (min_rel_freq < 0.0 || min_rel_freq > 1.0)
    throw Error(Errc::InvalidInput, "min_rel_freq outside [0,1]");
  if (max_lag < 0) throw Error(Errc::InvalidInput, "max_lag negative");
  if (exposure_degree < 1) throw Error(Errc::InvalidInput, "exposure_degree must be >= 1");
  if (lag_knots < 0) throw Error(Errc::InvalidInput, "lag_knots negative");
  for (const std::string& v : variants) make_variant(v);  // throws on unknown names
}

}  // namespace hwas
