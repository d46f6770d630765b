#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace hwas {

// Calendar date as a day count since 1970-01-01, backed by std::chrono civil
// arithmetic. Cheap to copy, totally ordered, usable as a map key.
struct Date {
  std::int32_t days = 0;

  auto operator<=>(const Date&) const = default;

  Date operator+(int n) const { return Date{days + n}; }
  Date operator-(int n) const { return Date{days - n}; }
  int operator-(Date o) const { return days - o.days; }

  static std::optional<Date> make(int year, unsigned month, unsigned day);
  // "YYYY-MM-DD"; rejects anything else.
  static std::optional<Date> parse(const std::string& s);

  int year() const;
  unsigned month() const;  // 1..12
  unsigned day() const;    // 1..31
  // ISO weekday, 1 = Monday .. 7 = Sunday.
  unsigned iso_weekday() const;

  std::string str() const;
};

const char* weekday_name(unsigned iso);  // "Mon".."Sun"

struct DateHash {
  std::size_t operator()(Date d) const { return static_cast<std::size_t>(d.days) * 0x9E3779B97F4A7C15ull; }
};

}  // namespace hwas
