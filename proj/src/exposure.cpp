#include "hwas/exposure.hpp"

#include <algorithm>
#include <cmath>

#include "hwas/csv.hpp"
#include "hwas/errors.hpp"

namespace hwas {

namespace {

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidInput,
                path + ": bad number '" + field + "' at line " + std::to_string(line));
  }
}

}  // namespace

void ExposureSeries::add(const std::string& tract_id, Date date, double tmax_c) {
  if (!std::isfinite(tmax_c)) throw Error(Errc::InvalidInput, "non-finite temperature");
  auto [it, inserted] = tracts_[tract_id].emplace(date.days, tmax_c);
  if (!inserted && it->second != tmax_c)
    throw Error(Errc::InvalidInput,
                "conflicting temperatures for tract " + tract_id + " on " + date.str());
  if (tracts_.size() == 1 && tracts_.begin()->second.size() == 1) {
    min_value_ = max_value_ = tmax_c;
  } else {
    min_value_ = std::min(min_value_, tmax_c);
    max_value_ = std::max(max_value_, tmax_c);
  }
  min_date_ = std::min(min_date_, date);
  max_date_ = std::max(max_date_, date);
}

void ExposureSeries::finalize() {
  citywide_.clear();
  std::unordered_map<std::int32_t, std::pair<double, std::size_t>> acc;
  for (const auto& [tract, days] : tracts_) {
    for (const auto& [day, value] : days) {
      auto& a = acc[day];
      a.first += value;
      a.second += 1;
    }
  }
  citywide_.reserve(acc.size());
  for (const auto& [day, a] : acc) {
    const double mean = a.first / static_cast<double>(a.second);
    citywide_.emplace(day, mean);
    min_value_ = std::min(min_value_, mean);
    max_value_ = std::max(max_value_, mean);
  }
}

std::optional<double> ExposureSeries::tract_tmax(const std::string& tract_id, Date date) const {
  auto t = tracts_.find(tract_id);
  if (t == tracts_.end()) return std::nullopt;
  auto d = t->second.find(date.days);
  if (d == t->second.end()) return std::nullopt;
  return d->second;
}

std::optional<double> ExposureSeries::citywide_tmax(Date date) const {
  auto d = citywide_.find(date.days);
  if (d == citywide_.end()) return std::nullopt;
  return d->second;
}

double ExposureSeries::tract_tmax_or_throw(const std::string& tract_id, Date date) const {
  auto t = tracts_.find(tract_id);
  if (t == tracts_.end()) throw Error(Errc::EmptyTract, "no cells or values for tract " + tract_id);
  auto d = t->second.find(date.days);
  if (d == t->second.end())
    throw Error(Errc::NoData, "tract " + tract_id + " has no value on " + date.str());
  return d->second;
}

double ExposureSeries::citywide_tmax_or_throw(Date date) const {
  auto d = citywide_.find(date.days);
  if (d == citywide_.end()) throw Error(Errc::NoData, "no citywide value on " + date.str());
  return d->second;
}

std::vector<std::string> ExposureSeries::contiguity_issues() const {
  std::vector<std::string> issues;
  std::map<int, std::vector<std::int32_t>> by_year;
  for (const auto& [day, value] : citywide_) {
    (void)value;
    by_year[Date{day}.year()].push_back(day);
  }
  for (auto& [year, days] : by_year) {
    std::sort(days.begin(), days.end());
    for (std::size_t i = 1; i < days.size(); ++i)
      if (days[i] != days[i - 1] + 1) {
        issues.push_back("gap in " + std::to_string(year) + " between " + Date{days[i - 1]}.str() +
                         " and " + Date{days[i]}.str());
        break;
      }
  }
  return issues;
}

ExposureSeries load_temperature_csv(const std::string& path) {
  CsvReader reader(path);
  const int cd = reader.col("date");
  const int ct = reader.col("tract_id");
  const int cv = reader.col("tmax_c");
  if (cd < 0 || ct < 0 || cv < 0)
    throw Error(Errc::InvalidInput, path + ": need columns date,tract_id,tmax_c");

  ExposureSeries series;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != reader.header().size())
      throw Error(Errc::InvalidInput, path + ": bad row at line " + std::to_string(reader.line_number()));
    auto date = Date::parse(f[cd]);
    if (!date) throw Error(Errc::InvalidInput, path + ": bad date " + f[cd]);
    if (f[ct].empty()) throw Error(Errc::InvalidInput, path + ": empty tract_id");
    series.add(f[ct], *date, parse_double(f[cv], path, reader.line_number()));
  }
  series.finalize();
  return series;
}

ExposureSeries link_grid_to_tracts(const std::vector<GridValue>& grid_values,
                                   const std::map<std::string, std::string>& cell_to_tract) {
  // (tract, date) -> running mean
  std::map<std::string, std::map<std::int32_t, std::pair<double, std::size_t>>> acc;
  for (const auto& g : grid_values) {
    auto m = cell_to_tract.find(g.cell_id);
    if (m == cell_to_tract.end())
      throw Error(Errc::InvalidInput, "grid cell without membership: " + g.cell_id);
    auto& a = acc[m->second][g.date.days];
    a.first += g.tmax_c;
    a.second += 1;
  }

  ExposureSeries series;
  for (const auto& [cell, tract] : cell_to_tract) {
    (void)cell;
    if (!acc.count(tract) || acc.at(tract).empty())
      throw Error(Errc::EmptyTract, "tract " + tract + " has no member-cell values");
  }
  for (const auto& [tract, days] : acc)
    for (const auto& [day, a] : days)
      series.add(tract, Date{day}, a.first / static_cast<double>(a.second));
  series.finalize();
  return series;
}

std::vector<GridValue> load_grid_csv(const std::string& path) {
  CsvReader reader(path);
  const int cc = reader.col("cell_id");
  const int cd = reader.col("date");
  const int cv = reader.col("tmax_c");
  if (cc < 0 || cd < 0 || cv < 0)
    throw Error(Errc::InvalidInput, path + ": need columns cell_id,date,tmax_c");
  std::vector<GridValue> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    auto date = Date::parse(f[cd]);
    if (!date) throw Error(Errc::InvalidInput, path + ": bad date " + f[cd]);
    out.push_back({f[cc], *date, parse_double(f[cv], path, reader.line_number())});
  }
  return out;
}

std::map<std::string, std::string> load_membership_csv(const std::string& path) {
  CsvReader reader(path);
  const int cc = reader.col("cell_id");
  const int ct = reader.col("tract_id");
  if (cc < 0 || ct < 0)
    throw Error(Errc::InvalidInput, path + ": need columns cell_id,tract_id");
  std::map<std::string, std::string> out;
  std::vector<std::string> f;
  while (reader.next(f)) out[f[cc]] = f[ct];
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::NoData, "quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw Error(Errc::InvalidInput, "quantile level outside [0,1]");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double h = (static_cast<double>(n) - 1.0) * q + 1.0;  // 1-indexed position
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo >= n) return values[n - 1];
  if (frac == 0.0) return values[lo - 1];
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

PercentileAnchors percentile_anchors(const ExposureSeries& series,
                                     const std::set<unsigned>& season_months, int year_min,
                                     int year_max) {
  std::vector<double> sample;
  for (const auto& [day, value] : series.citywide()) {
    const Date d{day};
    if (d.year() < year_min || d.year() > year_max) continue;
    if (!season_months.count(d.month())) continue;
    sample.push_back(value);
  }
  if (sample.empty()) throw Error(Errc::NoData, "no in-season citywide temperatures");

  PercentileAnchors a;
  a.p50 = quantile(sample, 0.50);
  a.p70 = quantile(sample, 0.70);
  a.p95 = quantile(sample, 0.95);
  a.season_months = season_months;
  a.year_min = year_min;
  a.year_max = year_max;
  return a;
}

bool is_extreme(Date date, const ExposureSeries& series, const PercentileAnchors& anchors,
                bool strict) {
  const double t = series.citywide_tmax_or_throw(date);
  return strict ? t > anchors.p95 : t >= anchors.p95;
}

}  // namespace hwas
