#include "hwas/dates.hpp"

#include <cstdio>

namespace hwas {

namespace chr = std::chrono;

static chr::year_month_day to_ymd(Date d) {
  return chr::year_month_day(chr::sys_days(chr::days(d.days)));
}

std::optional<Date> Date::make(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year(year), chr::month(month), chr::day(day)};
  if (!ymd.ok()) return std::nullopt;
  return Date{static_cast<std::int32_t>(chr::sys_days(ymd).time_since_epoch().count())};
}

std::optional<Date> Date::parse(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return make(y, m, d);
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

unsigned Date::iso_weekday() const {
  const chr::weekday wd{chr::sys_days(chr::days(days))};
  return wd.iso_encoding();
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

const char* weekday_name(unsigned iso) {
  static const char* names[] = {"", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  return (iso >= 1 && iso <= 7) ? names[iso] : "?";
}

}  // namespace hwas
