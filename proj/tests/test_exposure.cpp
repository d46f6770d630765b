#include <random>

#include "doctest.h"
#include "hwas/errors.hpp"
#include "hwas/exposure.hpp"

using namespace hwas;

namespace {
Date day(const char* s) { return *Date::parse(s); }
}  // namespace

TEST_CASE("grid linking averages member cells") {
  std::map<std::string, std::string> membership = {{"c1", "A"}, {"c2", "A"}, {"c3", "B"}};

  SUBCASE("single cell") {
    std::vector<GridValue> grid = {{"c1", day("2012-07-01"), 30.0},
                                   {"c3", day("2012-07-01"), 20.0}};
    auto series = link_grid_to_tracts(grid, membership);
    CHECK(*series.tract_tmax("A", day("2012-07-01")) == 30.0);
  }

  SUBCASE("two cells average") {
    std::vector<GridValue> grid = {{"c1", day("2012-07-01"), 30.0},
                                   {"c2", day("2012-07-01"), 32.0},
                                   {"c3", day("2012-07-01"), 20.0}};
    auto series = link_grid_to_tracts(grid, membership);
    CHECK(*series.tract_tmax("A", day("2012-07-01")) == doctest::Approx(31.0));
  }

  SUBCASE("tract with no member-cell values raises EmptyTract") {
    std::vector<GridValue> grid = {{"c1", day("2012-07-01"), 30.0}};
    CHECK_THROWS_AS(link_grid_to_tracts(grid, membership), Error);
  }
}

TEST_CASE("citywide series is the unweighted tract mean") {
  ExposureSeries s;
  s.add("A", day("2012-07-01"), 30.0);
  s.add("B", day("2012-07-01"), 32.0);
  s.add("A", day("2012-07-02"), 25.0);
  s.finalize();
  CHECK(*s.citywide_tmax(day("2012-07-01")) == doctest::Approx(31.0));
  CHECK(*s.citywide_tmax(day("2012-07-02")) == doctest::Approx(25.0));  // single tract
  CHECK_FALSE(s.citywide_tmax(day("2012-07-03")).has_value());
  CHECK_THROWS_AS(s.citywide_tmax_or_throw(day("2012-07-03")), Error);
  CHECK_THROWS_AS(s.tract_tmax_or_throw("C", day("2012-07-01")), Error);
}

TEST_CASE("quantile: order-statistic interpolation") {
  CHECK(quantile({1, 2, 3, 4, 5}, 0.50) == doctest::Approx(3.0));
  CHECK(quantile({1, 2, 3, 4}, 0.50) == doctest::Approx(2.5));
  CHECK(quantile({5, 1, 3, 2, 4}, 0.50) == doctest::Approx(3.0));  // unsorted in
  CHECK(quantile({7}, 0.95) == doctest::Approx(7.0));
  CHECK(quantile({1, 2, 3, 4}, 0.0) == doctest::Approx(1.0));
  CHECK(quantile({1, 2, 3, 4}, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("percentile anchors are monotone and season-filtered") {
  ExposureSeries s;
  // July 2012 ramp 20..30, out-of-season January noise that must be ignored
  for (int i = 0; i < 11; ++i) s.add("A", day("2012-07-01") + i, 20.0 + i);
  s.add("A", day("2012-01-05"), -10.0);
  s.finalize();
  auto a = percentile_anchors(s, {5, 6, 7, 8, 9}, 2011, 2023);
  CHECK(a.p50 == doctest::Approx(25.0));
  CHECK(a.p50 <= a.p70);
  CHECK(a.p70 <= a.p95);
  CHECK(a.p95 == doctest::Approx(29.5));  // h = 10.5 on 20..30
}

TEST_CASE("extreme-day rule is inclusive by default") {
  ExposureSeries s;
  for (int i = 0; i < 20; ++i) s.add("A", day("2012-07-01") + i, 20.0 + i);
  s.finalize();
  auto a = percentile_anchors(s, {7}, 2012, 2012);
  // find a day exactly at p95
  ExposureSeries s2;
  s2.add("A", day("2012-07-01"), a.p95);
  s2.add("A", day("2012-07-02"), a.p95 - 0.01);
  s2.add("A", day("2012-07-03"), a.p95 + 5.0);
  s2.finalize();
  CHECK(is_extreme(day("2012-07-01"), s2, a));
  CHECK_FALSE(is_extreme(day("2012-07-02"), s2, a));
  CHECK(is_extreme(day("2012-07-03"), s2, a));
  CHECK_FALSE(is_extreme(day("2012-07-01"), s2, a, /*strict=*/true));
}

TEST_CASE("permutation and scaling invariances") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(15.0, 35.0);
  std::vector<GridValue> grid;
  std::map<std::string, std::string> membership;
  for (int c = 0; c < 6; ++c) {
    membership["c" + std::to_string(c)] = c < 3 ? "A" : "B";
    for (int i = 0; i < 10; ++i)
      grid.push_back({"c" + std::to_string(c), day("2012-07-01") + i, u(rng)});
  }
  auto s1 = link_grid_to_tracts(grid, membership);
  std::shuffle(grid.begin(), grid.end(), rng);
  auto s2 = link_grid_to_tracts(grid, membership);
  for (int i = 0; i < 10; ++i) {
    CHECK(*s1.citywide_tmax(day("2012-07-01") + i) ==
          doctest::Approx(*s2.citywide_tmax(day("2012-07-01") + i)).epsilon(1e-12));
  }

  // scaling every cell scales tract and citywide means
  std::vector<GridValue> scaled = grid;
  for (auto& g : scaled) g.tmax_c *= 2.0;
  auto s3 = link_grid_to_tracts(scaled, membership);
  for (int i = 0; i < 10; ++i)
    CHECK(*s3.citywide_tmax(day("2012-07-01") + i) ==
          doctest::Approx(2.0 * *s1.citywide_tmax(day("2012-07-01") + i)).epsilon(1e-12));
}

TEST_CASE("contiguity issues are reported") {
  ExposureSeries s;
  s.add("A", day("2012-07-01"), 30.0);
  s.add("A", day("2012-07-03"), 30.0);  // gap
  s.finalize();
  CHECK_FALSE(s.contiguity_issues().empty());

  ExposureSeries ok;
  ok.add("A", day("2012-07-01"), 30.0);
  ok.add("A", day("2012-07-02"), 30.0);
  ok.add("A", day("2013-05-01"), 28.0);  // new year: separate run
  ok.finalize();
  CHECK(ok.contiguity_issues().empty());
}
