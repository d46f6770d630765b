#include "hwas/screening.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "hwas/errors.hpp"
#include "hwas/workers.hpp"

namespace hwas {

std::vector<double> daily_counts(const std::vector<VisitRecord>& visits, const std::string& code,
                                 const std::vector<Date>& calendar) {
  std::unordered_map<std::int32_t, std::size_t> day_index;
  day_index.reserve(calendar.size());
  for (std::size_t i = 0; i < calendar.size(); ++i) day_index.emplace(calendar[i].days, i);

  std::vector<double> counts(calendar.size(), 0.0);
  for (const VisitRecord& v : visits) {
    auto it = day_index.find(v.date.days);
    if (it == day_index.end()) continue;
    if (std::binary_search(v.codes.begin(), v.codes.end(), code)) counts[it->second] += 1.0;
  }
  return counts;
}

std::vector<double> bh_adjust(const std::vector<double>& pvalues) {
  const std::size_t m = pvalues.size();
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidInput, "p-value outside [0,1]");

  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

  std::vector<double> adj(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double v =
        std::min(1.0, pvalues[idx[r]] * static_cast<double>(m) / static_cast<double>(r + 1));
    running = std::min(running, v);
    adj[idx[r]] = running;
  }
  return adj;
}

std::vector<Date> season_calendar(const ExposureSeries& series,
                                  const std::set<unsigned>& season_months, int year_min,
                                  int year_max) {
  std::vector<Date> days;
  for (const auto& [day, value] : series.citywide()) {
    (void)value;
    const Date d{day};
    if (d.year() < year_min || d.year() > year_max) continue;
    if (!season_months.count(d.month())) continue;
    days.push_back(d);
  }
  std::sort(days.begin(), days.end());
  return days;
}

DesignMatrix screening_design(const std::vector<Date>& calendar, const ExposureSeries& series,
                              const std::set<Date>& holidays) {
  if (calendar.empty()) throw Error(Errc::InvalidInput, "empty calendar");

  std::set<int> years;
  std::set<unsigned> months;
  for (Date d : calendar) {
    years.insert(d.year());
    months.insert(d.month());
  }

  std::vector<std::string> names = {"intercept", "tmax"};
  std::map<int, std::size_t> year_col;
  std::map<unsigned, std::size_t> month_col;
  bool first = true;
  for (int y : years) {  // first level is the reference
    if (first) {
      first = false;
      continue;
    }
    year_col[y] = names.size();
    names.push_back("year" + std::to_string(y));
  }
  first = true;
  for (unsigned m : months) {
    if (first) {
      first = false;
      continue;
    }
    month_col[m] = names.size();
    names.push_back("month" + std::to_string(m));
  }
  std::map<unsigned, std::size_t> dow_col;
  for (unsigned wd = 2; wd <= 7; ++wd) {  // Monday is the reference
    dow_col[wd] = names.size();
    names.push_back(std::string("dow") + weekday_name(wd));
  }
  const std::size_t holiday_col = names.size();
  names.push_back("holiday");

  DesignMatrix design;
  design.names = names;
  design.X = la::Matrix(calendar.size(), names.size(), 0.0);
  for (std::size_t i = 0; i < calendar.size(); ++i) {
    const Date d = calendar[i];
    design.X(i, 0) = 1.0;
    design.X(i, 1) = series.citywide_tmax_or_throw(d);
    if (auto it = year_col.find(d.year()); it != year_col.end()) design.X(i, it->second) = 1.0;
    if (auto it = month_col.find(d.month()); it != month_col.end()) design.X(i, it->second) = 1.0;
    if (auto it = dow_col.find(d.iso_weekday()); it != dow_col.end()) design.X(i, it->second) = 1.0;
    if (holidays.count(d)) design.X(i, holiday_col) = 1.0;
  }
  return design;
}

std::vector<ScreeningRow> screen(const std::vector<VisitRecord>& visits,
                                 const ExposureSeries& series, const PercentileAnchors& anchors,
                                 const std::set<Date>& holidays, const ScreenSettings& settings) {
  const std::vector<Date> calendar =
      season_calendar(series, anchors.season_months, anchors.year_min, anchors.year_max);
  if (calendar.empty()) throw Error(Errc::InvalidInput, "no in-season days in the exposure series");

  std::unordered_map<std::int32_t, std::size_t> day_index;
  for (std::size_t i = 0; i < calendar.size(); ++i) day_index.emplace(calendar[i].days, i);
  std::vector<bool> day_hot(calendar.size());
  for (std::size_t i = 0; i < calendar.size(); ++i)
    day_hot[i] = series.citywide_tmax_or_throw(calendar[i]) > anchors.p70;

  // single pass over visits: per-code daily counts and hot-day counts
  std::map<std::string, std::vector<double>> counts;  // deterministic code order
  for (const VisitRecord& v : visits) {
    auto it = day_index.find(v.date.days);
    if (it == day_index.end()) continue;
    for (const std::string& code : v.codes) {
      auto& series_for_code = counts[code];
      if (series_for_code.empty()) series_for_code.assign(calendar.size(), 0.0);
      series_for_code[it->second] += 1.0;
    }
  }

  const DesignMatrix design = screening_design(calendar, series, holidays);

  std::vector<const std::string*> codes;
  std::vector<const std::vector<double>*> code_counts;
  for (const auto& [code, y] : counts) {
    codes.push_back(&code);
    code_counts.push_back(&y);
  }

  std::vector<ScreeningRow> rows(codes.size());
  parallel_for_index(codes.size(), settings.workers, [&](std::size_t i) {
    ScreeningRow& row = rows[i];
    row.code = *codes[i];
    const std::vector<double>& y = *code_counts[i];

    double total = 0.0, hot = 0.0;
    for (std::size_t d = 0; d < y.size(); ++d) {
      total += y[d];
      if (day_hot[d]) hot += y[d];
    }
    row.total_count = static_cast<long long>(total);
    row.rel_freq_above_p70 = total > 0.0 ? hot / total : 0.0;

    try {
      const QuasiPoissonFit fit = fit_quasipoisson(y, design, settings.tol, settings.max_iter);
      const EffectEstimate irr = irr_and_pvalue(fit, "tmax");
      row.irr = irr.point;
      row.ci_low = irr.ci_low;
      row.ci_high = irr.ci_high;
      row.raw_p = irr.p_value;
      row.fit_ok = fit.converged;
      if (!fit.converged) row.fail_reason = "NotConverged";
    } catch (const Error& e) {
      row.fit_ok = false;
      row.fail_reason = errc_name(e.code());
      row.irr = row.ci_low = row.ci_high = std::numeric_limits<double>::quiet_NaN();
      row.raw_p = std::numeric_limits<double>::quiet_NaN();
    }
  });

  // BH across every fitted code (the family is every code observed in
  // season, whether or not it later passes count/frequency criteria)
  std::vector<double> ps;
  std::vector<std::size_t> fitted;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].fit_ok) {
      fitted.push_back(i);
      ps.push_back(rows[i].raw_p);
    }
  const std::vector<double> adj = bh_adjust(ps);
  for (std::size_t k = 0; k < fitted.size(); ++k) rows[fitted[k]].adj_p = adj[k];

  for (ScreeningRow& row : rows) {
    if (!row.fit_ok) {
      row.adj_p = std::numeric_limits<double>::quiet_NaN();
      row.retained = false;
      continue;
    }
    row.crit_slope = row.irr > 1.0 && row.adj_p < settings.alpha;
    row.crit_freq = row.rel_freq_above_p70 >= settings.min_rel_freq;
    row.crit_count = row.total_count >= settings.min_count;
    row.retained = row.crit_slope && row.crit_freq && row.crit_count;
  }

  std::sort(rows.begin(), rows.end(), [](const ScreeningRow& a, const ScreeningRow& b) {
    const bool an = std::isnan(a.adj_p), bn = std::isnan(b.adj_p);
    if (an != bn) return bn;  // failures last
    if (!an && a.adj_p != b.adj_p) return a.adj_p < b.adj_p;
    return a.code < b.code;
  });
  return rows;
}

}  // namespace hwas
