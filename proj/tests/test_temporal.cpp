#include <doctest.h>

#include <random>

#include "stacc/temporal.hpp"

using namespace stacc;

TEST_CASE("fifteen-minute counts sum into the hour")
{
  const std::vector<IntervalCount> table{{360, 375, 50}, {375, 390, 50}, {390, 405, 50}, {405, 420, 50}};
  const HourlyCounts h = disaggregate_to_hourly(table);
  CHECK(h[6] == 200.0);
  CHECK(daily_total(h) == 200.0);
  for (int t = 0; t < kHours; ++t) {
    if (t != 6) CHECK(h[t] == 0.0);
  }
}

TEST_CASE("a five-hour count is divided evenly")
{
  const HourlyCounts h = disaggregate_to_hourly({{0, 300, 150}});
  for (int t = 0; t < 5; ++t) CHECK(h[t] == 30.0);
  for (int t = 5; t < kHours; ++t) CHECK(h[t] == 0.0);
}

TEST_CASE("empty and hourly tables")
{
  const HourlyCounts empty = disaggregate_to_hourly({});
  for (double v : empty) CHECK(v == 0.0);

  const HourlyCounts hourly = disaggregate_to_hourly({{660, 720, 17}, {1380, 1440, 4}});
  CHECK(hourly[11] == 17.0);
  CHECK(hourly[23] == 4.0);
}

TEST_CASE("intervals not on hour boundaries split by overlap")
{
  const HourlyCounts h = disaggregate_to_hourly({{450, 510, 60}});  // 7:30-8:30
  CHECK(h[7] == doctest::Approx(30.0));
  CHECK(h[8] == doctest::Approx(30.0));
}

TEST_CASE("disaggregation errors")
{
  CHECK_THROWS_AS(disaggregate_to_hourly({{0, 60, 1}, {30, 90, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(disaggregate_to_hourly({{0, 60, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(disaggregate_to_hourly({{0.5, 60, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(disaggregate_to_hourly({{60, 60, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(disaggregate_to_hourly({{1400, 1500, 1}}), std::invalid_argument);
}

TEST_CASE("supply_window")
{
  HourlyCounts all10;
  all10.fill(10.0);
  CHECK(supply_window(all10, 23) == 20.0);

  HourlyCounts h{};
  h[7] = 5;
  h[8] = 7;
  CHECK(supply_window(h, 7) == 12.0);
  HourlyCounts only7{};
  only7[7] = 5;
  CHECK(supply_window(only7, 8) == 0.0);
  CHECK_THROWS_AS(supply_window(h, 24), std::out_of_range);
  CHECK_THROWS_AS(supply_window(h, -1), std::out_of_range);
}

TEST_CASE("daily_total")
{
  HourlyCounts ones;
  ones.fill(1.0);
  CHECK(daily_total(ones) == 24.0);
  CHECK(daily_total(HourlyCounts{}) == 0.0);
}

namespace {

/// Random non-overlapping CTPP-like table: 15-minute, hourly and multi-hour
/// intervals with gaps.
std::vector<IntervalCount> random_table(std::mt19937_64& rng)
{
  std::uniform_int_distribution<int> len_pick(0, 3);
  std::uniform_int_distribution<int> gap(0, 40);
  std::uniform_real_distribution<double> count(0, 500);
  const int lengths[] = {15, 60, 300, 37};
  std::vector<IntervalCount> out;
  int at = gap(rng);
  while (true) {
    const int len = lengths[len_pick(rng)];
    if (at + len > kMinutesPerDay) break;
    out.push_back({double(at), double(at + len), count(rng)});
    at += len + gap(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("disaggregation preserves totals and is linear")
{
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_table(rng);
    const HourlyCounts h = disaggregate_to_hourly(a);
    double in = 0.0;
    for (const auto& iv : a) in += iv.count;
    CHECK(std::abs(daily_total(h) - in) <= 1e-12 * std::max(in, 1.0));

    double windows = 0.0;
    for (int t = 0; t < kHours; ++t) windows += supply_window(h, t);
    CHECK(windows == doctest::Approx(2.0 * daily_total(h)).epsilon(1e-12));

    // Split the table into two disjoint halves: the sum of the parts must
    // equal the whole.
    std::vector<IntervalCount> left, right;
    for (std::size_t i = 0; i < a.size(); ++i) (i % 2 ? right : left).push_back(a[i]);
    HourlyCounts sum = disaggregate_to_hourly(left);
    sum += disaggregate_to_hourly(right);
    for (int t = 0; t < kHours; ++t) CHECK(sum[t] == doctest::Approx(h[t]).epsilon(1e-12));
  }
}
