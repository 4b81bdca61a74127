#include "stacc/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stacc/csv.hpp"

namespace stacc {

namespace {

std::string describe(const IntervalCount& iv)
{
  std::ostringstream s;
  s << "[" << iv.start_minute << ", " << iv.end_minute << ")";
  return s.str();
}

void check_interval(const IntervalCount& iv)
{
  if (iv.start_minute != std::floor(iv.start_minute) || iv.end_minute != std::floor(iv.end_minute)) {
    throw std::invalid_argument("interval " + describe(iv) + " is not aligned to whole minutes");
  }
  if (!(iv.start_minute >= 0.0 && iv.start_minute < iv.end_minute && iv.end_minute <= kMinutesPerDay)) {
    throw std::invalid_argument("interval " + describe(iv) + " is outside [0, 1440) or empty");
  }
  if (!(iv.count >= 0.0) || !std::isfinite(iv.count)) {
    throw std::invalid_argument("interval " + describe(iv) + " has a negative or non-finite count");
  }
}

}  // namespace

HourlyCounts disaggregate_to_hourly(const std::vector<IntervalCount>& table)
{
  for (const IntervalCount& iv : table) check_interval(iv);

  std::vector<const IntervalCount*> order;
  order.reserve(table.size());
  for (const IntervalCount& iv : table) order.push_back(&iv);
  std::sort(order.begin(), order.end(),
            [](const IntervalCount* a, const IntervalCount* b) { return a->start_minute < b->start_minute; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->start_minute < order[i - 1]->end_minute) {
      throw std::invalid_argument("intervals " + describe(*order[i - 1]) + " and " + describe(*order[i]) +
                                  " overlap");
    }
  }

  HourlyCounts bins{};
  for (const IntervalCount& iv : table) {
    const double length = iv.end_minute - iv.start_minute;
    const int first = static_cast<int>(iv.start_minute) / 60;
    const int last = (static_cast<int>(iv.end_minute) - 1) / 60;
    if (first == last) {
      bins[first] += iv.count;
      continue;
    }
    for (int h = first; h <= last; ++h) {
      const double lo = std::max(iv.start_minute, h * 60.0);
      const double hi = std::min(iv.end_minute, (h + 1) * 60.0);
      bins[h] += iv.count * (hi - lo) / length;
    }
  }
  return bins;
}

double supply_window(const HourlyCounts& hourly, int hour)
{
  if (hour < 0 || hour >= kHours) {
    throw std::out_of_range("hour " + std::to_string(hour) + " outside 0..23");
  }
  return hourly[hour] + hourly[(hour + 1) % kHours];
}

double daily_total(const HourlyCounts& hourly)
{
  return std::accumulate(hourly.begin(), hourly.end(), 0.0);
}

HourlyCounts& operator+=(HourlyCounts& a, const HourlyCounts& b)
{
  for (int t = 0; t < kHours; ++t) a[t] += b[t];
  return a;
}

HourlyCounts scaled(const HourlyCounts& h, double factor)
{
  HourlyCounts out;
  for (int t = 0; t < kHours; ++t) out[t] = h[t] * factor;
  return out;
}

CountTable read_count_table(const std::filesystem::path& path)
{
  const csv::Table t = csv::read(path);
  const auto c_zone = t.column("zone_id");
  const auto c_start = t.column("start_minute");
  const auto c_end = t.column("end_minute");
  const auto c_count = t.column("count");
  CountTable out;
  for (const csv::Row& row : t.rows) {
    out[t.field(row, c_zone)].push_back(
        {t.number(row, c_start), t.number(row, c_end), t.number(row, c_count)});
  }
  return out;
}

ZoneHourly disaggregate_table(const CountTable& table)
{
  ZoneHourly out;
  for (const auto& [zone, intervals] : table) {
    try {
      out[zone] = disaggregate_to_hourly(intervals);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("zone " + zone + ": " + e.what());
    }
  }
  return out;
}

void write_zone_hourly(const std::filesystem::path& path, const ZoneHourly& hourly)
{
  std::ofstream out = csv::open_output(path);
  out << "zone_id,hour,count\n";
  for (const auto& [zone, bins] : hourly) {
    for (int t = 0; t < kHours; ++t) out << zone << ',' << t << ',' << csv::format_double(bins[t]) << '\n';
  }
}

ZoneHourly read_zone_hourly(const std::filesystem::path& path)
{
  const csv::Table t = csv::read(path);
  const auto c_zone = t.column("zone_id");
  const auto c_hour = t.column("hour");
  const auto c_count = t.column("count");
  ZoneHourly out;
  for (const csv::Row& row : t.rows) {
    const long long hour = t.integer(row, c_hour);
    if (hour < 0 || hour >= kHours) {
      throw std::runtime_error(path.string() + ":" + std::to_string(row.line) + ": hour out of range");
    }
    auto [it, inserted] = out.try_emplace(t.field(row, c_zone));
    if (inserted) it->second.fill(0.0);
    it->second[hour] = t.number(row, c_count);
  }
  return out;
}

}  // namespace stacc
