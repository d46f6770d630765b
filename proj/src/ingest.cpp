#include "hwas/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "hwas/csv.hpp"
#include "hwas/errors.hpp"

namespace hwas {

const char* to_token(Sex s) {
  switch (s) {
    case Sex::Female: return "Female";
    case Sex::Male: return "Male";
    case Sex::Other: return "Other";
    case Sex::Missing: return "";
  }
  return "";
}

const char* to_token(Race r) {
  switch (r) {
    case Race::Asian: return "Asian";
    case Race::BlackOrAfricanAmerican: return "BlackOrAfricanAmerican";
    case Race::White: return "White";
    case Race::Other: return "Other";
    case Race::Missing: return "";
  }
  return "";
}

const char* to_token(Region g) {
  switch (g) {
    case Region::Central: return "Central";
    case Region::North: return "North";
    case Region::Northwest: return "Northwest";
    case Region::South: return "South";
    case Region::Southwest: return "Southwest";
    case Region::FarSouth: return "FarSouth";
    case Region::West: return "West";
    case Region::Missing: return "";
  }
  return "";
}

std::optional<Sex> sex_from_token(const std::string& t) {
  if (t.empty()) return Sex::Missing;
  if (t == "Female") return Sex::Female;
  if (t == "Male") return Sex::Male;
  if (t == "Other") return Sex::Other;
  return std::nullopt;
}

std::optional<Race> race_from_token(const std::string& t) {
  if (t.empty()) return Race::Missing;
  if (t == "Asian") return Race::Asian;
  if (t == "BlackOrAfricanAmerican") return Race::BlackOrAfricanAmerican;
  if (t == "White") return Race::White;
  if (t == "Other") return Race::Other;
  return std::nullopt;
}

std::optional<Region> region_from_token(const std::string& t) {
  if (t.empty()) return Region::Missing;
  if (t == "Central") return Region::Central;
  if (t == "North") return Region::North;
  if (t == "Northwest") return Region::Northwest;
  if (t == "South") return Region::South;
  if (t == "Southwest") return Region::Southwest;
  if (t == "FarSouth") return Region::FarSouth;
  if (t == "West") return Region::West;
  return std::nullopt;
}

GemTable GemTable::load(const std::string& path) {
  GemTable gem;
  CsvReader reader(path);
  const int c9 = reader.col("icd9");
  const int c10 = reader.col("icd10");
  if (c9 < 0 || c10 < 0) throw Error(Errc::InvalidInput, path + ": need columns icd9,icd10");
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() <= static_cast<std::size_t>(std::max(c9, c10))) continue;
    const std::string& k = f[c9];
    const std::string& v = f[c10];
    if (k.empty() || v.empty())
      throw Error(Errc::InvalidInput, path + ": empty gem key or value");
    gem.rows[k].push_back(v);
  }
  return gem;
}

CalendarFeatures calendar_features(Date date, const std::set<Date>& holidays) {
  CalendarFeatures c;
  c.year = date.year();
  c.month = date.month();
  c.day_of_week = date.iso_weekday();
  c.is_holiday = holidays.count(date) > 0;
  return c;
}

bool is_category_code(const std::string& code) {
  if (code.size() != 3) return false;
  if (!std::isupper(static_cast<unsigned char>(code[0]))) return false;
  for (int i = 1; i < 3; ++i) {
    const unsigned char ch = static_cast<unsigned char>(code[i]);
    if (!std::isupper(ch) && !std::isdigit(ch)) return false;
  }
  return true;
}

namespace {

std::string normalize_code(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  for (char ch : raw) {
    if (ch == ' ' || ch == '\t') continue;
    s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  return s;
}

std::string truncate_icd10(const std::string& code) {
  const std::string cat = code.substr(0, 3);
  if (!is_category_code(cat))
    throw Error(Errc::InvalidCode, "not an ICD-10 category shape: " + code);
  return cat;
}

}  // namespace

std::set<std::string> map_diagnosis(const std::string& raw_code, CodeSystem system,
                                    const GemTable* gem) {
  const std::string code = normalize_code(raw_code);
  if (code.empty()) throw Error(Errc::InvalidCode, "empty diagnosis code");

  std::set<std::string> out;
  if (system == CodeSystem::ICD10) {
    out.insert(truncate_icd10(code));
    return out;
  }
  if (!gem) throw Error(Errc::InvalidInput, "ICD-9 input requires a GEM table");
  auto it = gem->rows.find(code);
  if (it == gem->rows.end())
    throw Error(Errc::UnmappableCode, "no GEM row for ICD-9 code " + code);
  for (const std::string& target : it->second) out.insert(truncate_icd10(normalize_code(target)));
  return out;
}

ParsedVisits parse_visits(const std::string& path, const GemTable* gem, const StudyFilter& filter) {
  CsvReader reader(path);
  const char* required[] = {"visit_id", "patient_id", "date",           "tract_id", "age_years",
                            "sex",      "race_ethnicity", "region",     "code",     "code_system"};
  int cols[10];
  for (int i = 0; i < 10; ++i) {
    cols[i] = reader.col(required[i]);
    if (cols[i] < 0)
      throw Error(Errc::InvalidInput, path + ": missing column " + required[i]);
  }

  ParsedVisits out;
  std::unordered_map<std::string, std::size_t> index;  // visit_id -> records slot
  std::vector<std::set<std::string>> code_sets;

  std::vector<std::string> f;
  while (reader.next(f)) {
    ++out.stats.rows_total;
    if (f.size() != reader.header().size()) {
      ++out.stats.malformed_rows;
      continue;
    }

    const std::string& visit_id = f[cols[0]];
    const std::string& date_s = f[cols[2]];
    if (visit_id.empty()) {
      ++out.stats.malformed_rows;
      continue;
    }
    auto date = Date::parse(date_s);
    if (!date) {
      ++out.stats.malformed_rows;
      continue;
    }

    int age = -1;
    const std::string& age_s = f[cols[4]];
    if (!age_s.empty()) {
      bool ok = !age_s.empty() && age_s.size() <= 4;
      for (char ch : age_s)
        if (ch < '0' || ch > '9') ok = false;
      if (!ok) {
        ++out.stats.malformed_rows;
        continue;
      }
      age = std::stoi(age_s);
    }

    auto sex = sex_from_token(f[cols[5]]);
    auto race = race_from_token(f[cols[6]]);
    auto region = region_from_token(f[cols[7]]);
    if (!sex || !race || !region) {
      ++out.stats.malformed_rows;
      continue;
    }

    CodeSystem system;
    if (f[cols[9]] == "ICD10")
      system = CodeSystem::ICD10;
    else if (f[cols[9]] == "ICD9")
      system = CodeSystem::ICD9;
    else {
      ++out.stats.malformed_rows;
      continue;
    }

    // study filters
    if (date->year() < filter.year_min || date->year() > filter.year_max) {
      ++out.stats.out_of_years;
      continue;
    }
    if (!filter.season_months.count(date->month())) {
      ++out.stats.out_of_season;
      continue;
    }
    if (age >= 0 && age < filter.min_age) {
      ++out.stats.under_age;
      continue;
    }
    if (age < 0 && !filter.keep_missing_age) {
      ++out.stats.missing_age_dropped;
      continue;
    }

    auto it = index.find(visit_id);
    std::size_t slot;
    if (it == index.end()) {
      VisitRecord rec;
      rec.visit_id = visit_id;
      rec.patient_id = f[cols[1]];
      rec.date = *date;
      rec.tract_id = f[cols[3]];
      rec.age_years = age;
      rec.sex = *sex;
      rec.race = *race;
      rec.region = *region;
      slot = out.records.size();
      index.emplace(visit_id, slot);
      out.records.push_back(std::move(rec));
      code_sets.emplace_back();
    } else {
      slot = it->second;
      const VisitRecord& rec = out.records[slot];
      const bool same = rec.patient_id == f[cols[1]] && rec.date == *date &&
                        rec.tract_id == f[cols[3]] && rec.age_years == age && rec.sex == *sex &&
                        rec.race == *race && rec.region == *region;
      if (!same) {
        ++out.stats.duplicate_conflicts;
        continue;
      }
    }

    const std::string& code = f[cols[8]];
    if (!code.empty()) {
      try {
        for (const std::string& cat : map_diagnosis(code, system, gem)) code_sets[slot].insert(cat);
      } catch (const Error& e) {
        if (e.code() == Errc::UnmappableCode)
          ++out.stats.unmappable_codes;
        else
          ++out.stats.invalid_codes;
      }
    }
    ++out.stats.rows_kept;
  }

  for (std::size_t i = 0; i < out.records.size(); ++i)
    out.records[i].codes.assign(code_sets[i].begin(), code_sets[i].end());
  out.stats.visits = static_cast<long long>(out.records.size());
  return out;
}

std::set<Date> load_holidays(const std::string& path) {
  CsvReader reader(path);
  const int c = reader.col("date");
  if (c < 0) throw Error(Errc::InvalidInput, path + ": need column date");
  std::set<Date> days;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() <= static_cast<std::size_t>(c)) continue;
    auto d = Date::parse(f[c]);
    if (!d) throw Error(Errc::InvalidInput, path + ": bad date " + f[c]);
    days.insert(*d);
  }
  return days;
}

std::size_t distinct_categories(const std::vector<VisitRecord>& records) {
  std::set<std::string> cats;
  for (const auto& r : records) cats.insert(r.codes.begin(), r.codes.end());
  return cats.size();
}

}  // namespace hwas
