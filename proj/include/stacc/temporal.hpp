// Interval-coded counts to 24 hourly bins, and the two-hour supply window.
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace stacc {

inline constexpr int kHours = 24;
inline constexpr int kMinutesPerDay = 1440;

/// A count reported over [start_minute, end_minute), minutes since midnight.
struct IntervalCount {
  double start_minute = 0.0;
  double end_minute = 0.0;
  double count = 0.0;
};

/// Bin t covers [t:00, t+1:00).
using HourlyCounts = std::array<double, kHours>;

/// Splits each interval over the hourly bins in proportion to its temporal
/// overlap with each bin. Throws std::invalid_argument for overlapping,
/// out-of-day, non-integral-minute or negative-count intervals.
HourlyCounts disaggregate_to_hourly(const std::vector<IntervalCount>& table);

/// Jobs reachable by workers departing in hour t: bins t and (t+1) mod 24.
double supply_window(const HourlyCounts& hourly, int hour);

double daily_total(const HourlyCounts& hourly);

HourlyCounts& operator+=(HourlyCounts& a, const HourlyCounts& b);
HourlyCounts scaled(const HourlyCounts& h, double factor);

/// zone id -> interval table, read from `zone_id,start_minute,end_minute,count`.
using CountTable = std::map<std::string, std::vector<IntervalCount>>;

CountTable read_count_table(const std::filesystem::path& path);

/// zone id -> hourly counts.
using ZoneHourly = std::map<std::string, HourlyCounts>;

ZoneHourly disaggregate_table(const CountTable& table);

/// `zone_id,hour,count` rows, 24 per zone, zones in id order.
void write_zone_hourly(const std::filesystem::path& path, const ZoneHourly& hourly);
ZoneHourly read_zone_hourly(const std::filesystem::path& path);

}  // namespace stacc
