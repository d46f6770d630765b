#include "hwas/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

#include "hwas/csv.hpp"
#include "hwas/errors.hpp"

namespace hwas {

using nlohmann::json;

SynthScenario SynthScenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open scenario: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }

  SynthScenario s;
  try {
    s.n_codes = j.value("n_codes", s.n_codes);
    s.n_tracts = j.value("n_tracts", s.n_tracts);
    if (j.contains("season_months")) {
      s.season_months.clear();
      for (auto m : j.at("season_months")) s.season_months.insert(m.get<unsigned>());
    }
    s.year_min = j.value("year_min", s.year_min);
    s.year_max = j.value("year_max", s.year_max);
    s.lead_days = j.value("lead_days", s.lead_days);
    s.trail_days = j.value("trail_days", s.trail_days);
    s.baseline_rate = j.value("baseline_rate", s.baseline_rate);
    s.baseline_spread = j.value("baseline_spread", s.baseline_spread);
    s.overdispersion = j.value("overdispersion", s.overdispersion);
    if (j.contains("temp")) {
      const json& t = j.at("temp");
      s.temp.mean_c = t.value("mean_c", s.temp.mean_c);
      s.temp.seasonal_amplitude = t.value("seasonal_amplitude", s.temp.seasonal_amplitude);
      s.temp.daily_sigma = t.value("daily_sigma", s.temp.daily_sigma);
      s.temp.ar1 = t.value("ar1", s.temp.ar1);
      s.temp.ma4 = t.value("ma4", s.temp.ma4);
      s.temp.tract_offset_sd = t.value("tract_offset_sd", s.temp.tract_offset_sd);
      s.temp.tract_noise_sd = t.value("tract_noise_sd", s.temp.tract_noise_sd);
    }
    if (j.contains("calendar")) {
      const json& c = j.at("calendar");
      s.calendar.dow_amplitude = c.value("dow_amplitude", s.calendar.dow_amplitude);
      s.calendar.month_amplitude = c.value("month_amplitude", s.calendar.month_amplitude);
      s.calendar.year_amplitude = c.value("year_amplitude", s.calendar.year_amplitude);
      s.calendar.holiday = c.value("holiday", s.calendar.holiday);
    }
    if (j.contains("demographics")) {
      const json& d = j.at("demographics");
      s.demographics.p_female = d.value("p_female", s.demographics.p_female);
      s.demographics.p_male = d.value("p_male", s.demographics.p_male);
      s.demographics.p_sex_other = d.value("p_sex_other", s.demographics.p_sex_other);
      s.demographics.p_age_missing = d.value("p_age_missing", s.demographics.p_age_missing);
      s.demographics.p_tract_missing = d.value("p_tract_missing", s.demographics.p_tract_missing);
    }
    if (j.contains("effects"))
      for (const json& e : j.at("effects")) {
        InjectedEffect eff;
        eff.code = e.at("code").get<std::string>();
        for (auto v : e.at("lag_slopes")) eff.lag_slopes.push_back(v.get<double>());
        eff.baseline_rate = e.value("baseline_rate", -1.0);
        const std::string kind = e.value("kind", "linear");
        if (kind == "step")
          eff.kind = InjectedEffect::Kind::Step;
        else if (kind != "linear")
          throw Error(Errc::InvalidInput, "effect kind must be linear or step");
        eff.threshold_pct = e.value("threshold_pct", eff.threshold_pct);
        s.effects.push_back(std::move(eff));
      }
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }
  return s;
}

std::string SynthScenario::canonical_json() const {
  json j;
  j["n_codes"] = n_codes;
  j["n_tracts"] = n_tracts;
  j["season_months"] = std::vector<unsigned>(season_months.begin(), season_months.end());
  j["year_min"] = year_min;
  j["year_max"] = year_max;
  j["lead_days"] = lead_days;
  j["trail_days"] = trail_days;
  j["baseline_rate"] = baseline_rate;
  j["baseline_spread"] = baseline_spread;
  j["overdispersion"] = overdispersion;
  j["temp"] = {{"mean_c", temp.mean_c},
               {"seasonal_amplitude", temp.seasonal_amplitude},
               {"daily_sigma", temp.daily_sigma},
               {"ar1", temp.ar1},
               {"ma4", temp.ma4},
               {"tract_offset_sd", temp.tract_offset_sd},
               {"tract_noise_sd", temp.tract_noise_sd}};
  j["calendar"] = {{"dow_amplitude", calendar.dow_amplitude},
                   {"month_amplitude", calendar.month_amplitude},
                   {"year_amplitude", calendar.year_amplitude},
                   {"holiday", calendar.holiday}};
  j["demographics"] = {{"p_female", demographics.p_female},
                       {"p_male", demographics.p_male},
                       {"p_sex_other", demographics.p_sex_other},
                       {"p_age_missing", demographics.p_age_missing},
                       {"p_tract_missing", demographics.p_tract_missing}};
  json effs = json::array();
  for (const auto& e : effects)
    effs.push_back({{"code", e.code},
                    {"lag_slopes", e.lag_slopes},
                    {"baseline_rate", e.baseline_rate},
                    {"kind", e.kind == InjectedEffect::Kind::Step ? "step" : "linear"},
                    {"threshold_pct", e.threshold_pct}});
  j["effects"] = effs;
  j["seed"] = seed;
  return j.dump();
}

std::string SynthScenario::hash() const {
  const std::string canon = canonical_json();
  return hex64(fnv1a64(canon.data(), canon.size()));
}

std::string synth_code_name(int index) {
  char buf[4];
  buf[0] = static_cast<char>('A' + index / 100);
  buf[1] = static_cast<char>('0' + (index / 10) % 10);
  buf[2] = static_cast<char>('0' + index % 10);
  buf[3] = '\0';
  return buf;
}

std::set<Date> synth_holidays(int year_min, int year_max) {
  std::set<Date> days;
  for (int y = year_min; y <= year_max; ++y) {
    // last Monday of May
    Date memorial = *Date::make(y, 5, 31);
    while (memorial.iso_weekday() != 1) memorial = memorial - 1;
    days.insert(memorial);
    days.insert(*Date::make(y, 7, 4));
    // first Monday of September
    Date labor = *Date::make(y, 9, 1);
    while (labor.iso_weekday() != 1) labor = labor + 1;
    days.insert(labor);
  }
  return days;
}

namespace {

struct SeasonSpan {
  Date lead_start;  // season start minus lead_days
  Date start;
  Date end;
  Date trail_end;  // season end plus trail_days
};

std::vector<SeasonSpan> season_spans(const SynthScenario& s) {
  const unsigned first_month = *s.season_months.begin();
  const unsigned last_month = *s.season_months.rbegin();
  std::vector<SeasonSpan> spans;
  for (int y = s.year_min; y <= s.year_max; ++y) {
    SeasonSpan span;
    span.start = *Date::make(y, first_month, 1);
    Date end = *Date::make(y, last_month, 1);
    while ((end + 1).month() == last_month) end = end + 1;
    span.end = end;
    span.lead_start = span.start - s.lead_days;
    span.trail_end = span.end + s.trail_days;
    spans.push_back(span);
  }
  return spans;
}

double dow_pattern(unsigned iso_weekday) {
  static const double pattern[8] = {0.0, 0.0, -0.1, -0.05, 0.0, 0.1, 0.3, 0.25};
  return pattern[iso_weekday];
}

}  // namespace

SynthOutput generate_synthetic(const SynthScenario& s, const std::string& out_dir) {
  if (s.n_codes < 1 || s.n_codes > 2600)
    throw Error(Errc::InvalidInput, "n_codes must be in 1..2600");
  if (s.n_tracts < 1) throw Error(Errc::InvalidInput, "n_tracts must be >= 1");
  if (s.baseline_rate <= 0.0) throw Error(Errc::InvalidInput, "baseline_rate must be positive");

  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::vector<SeasonSpan> spans = season_spans(s);
  const std::string comment = "scenario_hash=" + s.hash();

  // ---- temperature field ----
  std::vector<std::string> tract_ids;
  std::vector<double> tract_offsets;
  for (int t = 0; t < s.n_tracts; ++t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%03d", t);
    tract_ids.push_back(buf);
    tract_offsets.push_back(gauss(rng) * s.temp.tract_offset_sd);
  }

  ExposureSeries series;
  {
    CsvWriter w(out_dir + "/temperature.csv", {"date", "tract_id", "tmax_c"}, comment);
    for (const SeasonSpan& span : spans) {
      const int n_days = span.trail_end - span.lead_start + 1;
      double ar = 0.0;
      double innov[4] = {0, 0, 0, 0};  // ring buffer: slot i%4 holds the lag-4 innovation
      const double innov_sd = s.temp.daily_sigma *
                              std::sqrt((1.0 - s.temp.ar1 * s.temp.ar1) /
                                        (1.0 + s.temp.ma4 * s.temp.ma4));
      for (int i = 0; i < n_days; ++i) {
        const Date d = span.lead_start + i;
        const double e = innov_sd * gauss(rng);
        ar = s.temp.ar1 * ar + e + s.temp.ma4 * innov[i % 4];
        innov[i % 4] = e;
        // seasonal arc peaking mid-July
        const double frac =
            static_cast<double>(d - *Date::make(d.year(), 1, 1)) / 365.0;
        const double seasonal =
            s.temp.mean_c + s.temp.seasonal_amplitude * std::sin((frac - 0.28) * 2.0 * M_PI);
        const double citywide_latent = seasonal + ar;
        for (int t = 0; t < s.n_tracts; ++t) {
          const double noise = s.temp.tract_noise_sd > 0.0 ? gauss(rng) * s.temp.tract_noise_sd : 0.0;
          const double v = citywide_latent + tract_offsets[t] + noise;
          series.add(tract_ids[t], d, v);
          w.row({d.str(), tract_ids[t], fmt_full(v)});
        }
      }
    }
    w.close();
  }
  series.finalize();

  const PercentileAnchors anchors =
      percentile_anchors(series, s.season_months, s.year_min, s.year_max);

  // ---- holidays ----
  const std::set<Date> holidays = synth_holidays(s.year_min, s.year_max);
  {
    CsvWriter w(out_dir + "/holidays.csv", {"date"}, comment);
    for (Date d : holidays) w.row({d.str()});
    w.close();
  }

  // ---- per-code baselines and effects ----
  std::vector<double> baselines(s.n_codes);
  for (int c = 0; c < s.n_codes; ++c) {
    const double u = 2.0 * unif(rng) - 1.0;  // log-uniform spread
    baselines[c] = s.baseline_rate * std::pow(s.baseline_spread, u);
  }
  struct CodeEffect {
    std::vector<double> lag_slopes;
    InjectedEffect::Kind kind = InjectedEffect::Kind::Linear;
    double tau = 0.0;  // resolved step threshold
  };
  std::vector<double> in_season_citywide;
  for (const auto& [day, value] : series.citywide()) {
    const Date d{day};
    if (d.year() >= s.year_min && d.year() <= s.year_max && s.season_months.count(d.month()))
      in_season_citywide.push_back(value);
  }
  std::vector<CodeEffect> effects(s.n_codes);
  for (const InjectedEffect& e : s.effects) {
    int idx = -1;
    for (int c = 0; c < s.n_codes; ++c)
      if (synth_code_name(c) == e.code) idx = c;
    if (idx < 0) throw Error(Errc::InvalidInput, "effect for unknown synth code " + e.code);
    effects[idx].lag_slopes = e.lag_slopes;
    effects[idx].kind = e.kind;
    if (e.kind == InjectedEffect::Kind::Step)
      effects[idx].tau = quantile(in_season_citywide, e.threshold_pct);
    if (e.baseline_rate > 0.0) baselines[idx] = e.baseline_rate;
    if (static_cast<int>(e.lag_slopes.size()) > s.lead_days)
      throw Error(Errc::InvalidInput, "lag_slopes longer than lead_days");
  }
  auto effect_at = [&](const CodeEffect& ce, double temp, std::size_t lag) {
    const double sl = lag < ce.lag_slopes.size() ? ce.lag_slopes[lag] : 0.0;
    if (sl == 0.0) return 0.0;
    if (ce.kind == InjectedEffect::Kind::Linear) return sl * (temp - anchors.p50);
    return temp >= ce.tau ? sl : 0.0;
  };

  // ---- truth: analytic log-OR at P95 vs P50 per lag and cumulative ----
  {
    CsvWriter w(out_dir + "/truth.csv", {"code", "contrast", "log_or"}, comment);
    const int max_truth_lag = 8;
    for (int c = 0; c < s.n_codes; ++c) {
      double cum = 0.0;
      for (int l = 0; l <= max_truth_lag; ++l) {
        const double lor = effect_at(effects[c], anchors.p95, l) -
                           effect_at(effects[c], anchors.p50, l);
        cum += lor;
        w.row({synth_code_name(c), "lag" + std::to_string(l), fmt_full(lor)});
        if (l >= 1) w.row({synth_code_name(c), "cum0-" + std::to_string(l), fmt_full(cum)});
      }
    }
    w.close();
  }

  // ---- visits: per (code, day, tract) Poisson counts expanded to rows ----
  SynthOutput out;
  {
    CsvWriter w(out_dir + "/visits.csv",
                {"visit_id", "patient_id", "date", "tract_id", "age_years", "sex",
                 "race_ethnicity", "region", "code", "code_system"},
                comment);

    const char* races[] = {"Asian", "BlackOrAfricanAmerican", "White", "Other", ""};
    const double race_p[] = {0.02, 0.53, 0.28, 0.13, 0.04};
    const char* regions[] = {"Central", "North", "Northwest", "South", "Southwest",
                             "FarSouth", "West", ""};
    const double region_p[] = {0.10, 0.10, 0.08, 0.11, 0.13, 0.06, 0.33, 0.09};

    long long visit_counter = 0;
    std::vector<double> tract_weight(s.n_tracts, 1.0 / s.n_tracts);

    for (int c = 0; c < s.n_codes; ++c) {
      const std::string code = synth_code_name(c);
      const CodeEffect& ce = effects[c];
      for (const SeasonSpan& span : spans) {
        for (Date d = span.start; d <= span.end; d = d + 1) {
          const double cal = s.calendar.dow_amplitude * dow_pattern(d.iso_weekday()) +
                             s.calendar.month_amplitude * (static_cast<double>(d.month()) - 7.0) +
                             s.calendar.year_amplitude * ((d.year() - s.year_min) % 3 - 1.0) +
                             (holidays.count(d) ? s.calendar.holiday : 0.0);
          double day_mix = 1.0;
          if (s.overdispersion > 0.0) {
            std::gamma_distribution<double> gamma_mix(1.0 / s.overdispersion, s.overdispersion);
            day_mix = gamma_mix(rng);
          }
          for (int t = 0; t < s.n_tracts; ++t) {
            double lag_term = 0.0;
            for (std::size_t l = 0; l < ce.lag_slopes.size(); ++l) {
              if (ce.lag_slopes[l] == 0.0) continue;
              const double temp = *series.tract_tmax(tract_ids[t], d - static_cast<int>(l));
              lag_term += effect_at(ce, temp, l);
            }
            const double lambda =
                baselines[c] * tract_weight[t] * day_mix * std::exp(cal + lag_term);
            long long count = 0;
            if (lambda > 0.0) {
              std::poisson_distribution<long long> pois(lambda);
              count = pois(rng);
            }
            for (long long k = 0; k < count; ++k) {
              ++visit_counter;
              char vid[24];
              std::snprintf(vid, sizeof(vid), "V%010lld", visit_counter);
              char pid[24];
              std::snprintf(pid, sizeof(pid), "P%010lld", visit_counter);

              const double us = unif(rng);
              const char* sex = us < s.demographics.p_female             ? "Female"
                                : us < s.demographics.p_female + s.demographics.p_male ? "Male"
                                : us < s.demographics.p_female + s.demographics.p_male +
                                           s.demographics.p_sex_other
                                    ? "Other"
                                    : "";
              std::string age;
              if (unif(rng) >= s.demographics.p_age_missing)
                age = std::to_string(18 + static_cast<int>(unif(rng) * 72.0));
              double ur = unif(rng);
              int ri = 0;
              for (double acc = race_p[0]; ur > acc && ri < 4; acc += race_p[++ri]) {
              }
              double ug = unif(rng);
              int gi = 0;
              for (double acc = region_p[0]; ug > acc && gi < 7; acc += region_p[++gi]) {
              }
              const std::string tract =
                  unif(rng) < s.demographics.p_tract_missing ? "" : tract_ids[t];

              w.row({vid, pid, d.str(), tract, age, sex, races[ri], regions[gi], code, "ICD10"});
            }
          }
        }
      }
    }
    w.close();
    out.n_visits = visit_counter;
  }

  out.visits_path = out_dir + "/visits.csv";
  out.temperature_path = out_dir + "/temperature.csv";
  out.holidays_path = out_dir + "/holidays.csv";
  out.truth_path = out_dir + "/truth.csv";
  out.anchors = anchors;
  return out;
}

}  // namespace hwas
