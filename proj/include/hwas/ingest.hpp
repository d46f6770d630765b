#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hwas/dates.hpp"

namespace hwas {

enum class Sex { Female, Male, Other, Missing };
enum class Race { Asian, BlackOrAfricanAmerican, White, Other, Missing };
enum class Region { Central, North, Northwest, South, Southwest, FarSouth, West, Missing };
enum class CodeSystem { ICD9, ICD10 };

const char* to_token(Sex s);
const char* to_token(Race r);
const char* to_token(Region g);
std::optional<Sex> sex_from_token(const std::string& t);
std::optional<Race> race_from_token(const std::string& t);
std::optional<Region> region_from_token(const std::string& t);

// One acute-care encounter. codes holds deduplicated 3-character ICD-10
// categories, kept sorted so record equality and file round-trips are
// deterministic. age_years = -1 and empty tract_id mean missing.
struct VisitRecord {
  std::string visit_id;
  std::string patient_id;
  Date date;
  std::string tract_id;
  int age_years = -1;
  Sex sex = Sex::Missing;
  Race race = Race::Missing;
  Region region = Region::Missing;
  std::vector<std::string> codes;

  bool has_age() const { return age_years >= 0; }
};

// ICD-9 -> ICD-10 general equivalence rows (one-to-many allowed).
struct GemTable {
  std::map<std::string, std::vector<std::string>> rows;
  static GemTable load(const std::string& path);
};

struct CalendarFeatures {
  int year = 0;
  unsigned month = 0;
  unsigned day_of_week = 0;  // ISO, 1 = Monday
  bool is_holiday = false;
};

CalendarFeatures calendar_features(Date date, const std::set<Date>& holidays);

// True for the 3-character ICD-10 category shape: letter then two
// alphanumerics (already uppercased).
bool is_category_code(const std::string& code);

// Normalizes a raw diagnosis code to 3-character categories: ICD-10 codes
// are truncated, ICD-9 codes go through the GEM table first. Throws
// UnmappableCode / InvalidCode; parse_visits catches those per code.
std::set<std::string> map_diagnosis(const std::string& raw_code, CodeSystem system,
                                    const GemTable* gem);

struct StudyFilter {
  std::set<unsigned> season_months = {5, 6, 7, 8, 9};
  int year_min = 2011;
  int year_max = 2023;
  int min_age = 18;
  bool keep_missing_age = true;
};

struct ParseStats {
  long long rows_total = 0;
  long long rows_kept = 0;
  long long malformed_rows = 0;
  long long out_of_season = 0;
  long long out_of_years = 0;
  long long under_age = 0;
  long long missing_age_dropped = 0;
  long long duplicate_conflicts = 0;
  long long unmappable_codes = 0;
  long long invalid_codes = 0;
  long long visits = 0;
};

struct ParsedVisits {
  std::vector<VisitRecord> records;  // first-appearance order of visit_id
  ParseStats stats;
};

// Long-format visits.csv: one row per visit-code pair; rows of one visit are
// merged into a single record with a deduplicated code set. Malformed rows
// and demographic conflicts are dropped and counted, never fatal.
ParsedVisits parse_visits(const std::string& path, const GemTable* gem, const StudyFilter& filter);

std::set<Date> load_holidays(const std::string& path);

// Distinct category count across a parsed corpus (the screening family size
// cross-check).
std::size_t distinct_categories(const std::vector<VisitRecord>& records);

}  // namespace hwas
