#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hwas/dates.hpp"

namespace hwas {

// Daily maximum temperature by census tract plus the derived citywide
// series (unweighted mean over tracts with data that day). Immutable once
// built; all lookups are read-only and thread-safe.
class ExposureSeries {
 public:
  using DayMap = std::unordered_map<std::int32_t, double>;

  void add(const std::string& tract_id, Date date, double tmax_c);
  // Recomputes the citywide series from the tract values.
  void finalize();

  std::optional<double> tract_tmax(const std::string& tract_id, Date date) const;
  std::optional<double> citywide_tmax(Date date) const;
  // Throwing accessors: EmptyTract for an unknown tract, NoData for a
  // missing date.
  double tract_tmax_or_throw(const std::string& tract_id, Date date) const;
  double citywide_tmax_or_throw(Date date) const;

  bool has_tract(const std::string& tract_id) const { return tracts_.count(tract_id) > 0; }
  std::size_t n_tracts() const { return tracts_.size(); }
  Date min_date() const { return min_date_; }
  Date max_date() const { return max_date_; }
  // Range over every stored value (tract and citywide); the exposure-basis
  // boundaries come from here so every lagged temperature is in-domain.
  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }

  const std::map<std::string, DayMap>& tracts() const { return tracts_; }
  const DayMap& citywide() const { return citywide_; }

  // Per-year gaps in the citywide series (dates present must form one
  // contiguous run per calendar year). Returns human-readable issues.
  std::vector<std::string> contiguity_issues() const;

 private:
  std::map<std::string, DayMap> tracts_;
  DayMap citywide_;
  Date min_date_{INT32_MAX};
  Date max_date_{INT32_MIN};
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

// temperature.csv: date, tract_id, tmax_c (already tract-linked).
ExposureSeries load_temperature_csv(const std::string& path);

struct GridValue {
  std::string cell_id;
  Date date;
  double tmax_c;
};

// grid.csv + membership.csv: per-date tract value = arithmetic mean of the
// member cells reporting that date. Tracts present in the membership but
// with no member cells at all raise EmptyTract.
ExposureSeries link_grid_to_tracts(const std::vector<GridValue>& grid_values,
                                   const std::map<std::string, std::string>& cell_to_tract);

std::vector<GridValue> load_grid_csv(const std::string& path);
std::map<std::string, std::string> load_membership_csv(const std::string& path);

struct PercentileAnchors {
  double p50 = 0.0;
  double p70 = 0.0;
  double p95 = 0.0;
  std::set<unsigned> season_months;
  int year_min = 0;
  int year_max = 0;
};

// Linear interpolation between order statistics at position h = (n-1)q + 1.
double quantile(std::vector<double> values, double q);

PercentileAnchors percentile_anchors(const ExposureSeries& series,
                                     const std::set<unsigned>& season_months, int year_min,
                                     int year_max);

// tmax >= p95 by default ("at or above the 95th percentile"); strict makes
// the comparison exclusive.
bool is_extreme(Date date, const ExposureSeries& series, const PercentileAnchors& anchors,
                bool strict = false);

}  // namespace hwas
