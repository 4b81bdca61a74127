#include "stacc/dasymetric.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "stacc/csv.hpp"
#include "stacc/parallel.hpp"

namespace stacc {

namespace {

struct ZoneWeights {
  std::vector<std::pair<CellId, double>> cells;  // fractions of the zone's mass
  bool fallback = false;
};

bool has_mass(const HourlyCounts& h)
{
  return std::any_of(h.begin(), h.end(), [](double v) { return v > 0.0; });
}

void add_piece_cells(const MultiPolygon& piece, const Grid& grid, std::map<CellId, double>& acc)
{
  CellIndex lo, hi;
  if (!grid.cell_range(bounds(piece), lo, hi)) return;
  for (int row = lo.row; row <= hi.row; ++row) {
    for (int col = lo.col; col <= hi.col; ++col) {
      const CellIndex c{col, row};
      const double a = intersection_area(piece, grid.cell_box(c));
      if (a > 0.0) acc[grid.id(c)] += a;
    }
  }
}

ZoneWeights zone_weights(const CountZone& zone, const std::vector<const AuxiliaryZone*>& aux,
                         const PolygonIndex& index, const Grid& grid)
{
  std::vector<MultiPolygon> pieces;
  double total = 0.0;
  for (std::size_t id : index.query(bounds(zone.geometry))) {
    MultiPolygon piece = intersection(aux[id]->geometry, zone.geometry);
    const double a = area(piece);
    if (a < kSliverArea) continue;
    total += a;
    pieces.push_back(std::move(piece));
  }

  ZoneWeights out;
  if (pieces.empty()) {
    out.fallback = true;
    pieces.push_back(zone.geometry);
    total = area(zone.geometry);
  }
  if (!(total > 0.0)) return out;

  std::map<CellId, double> acc;
  for (const MultiPolygon& piece : pieces) add_piece_cells(piece, grid, acc);
  out.cells.reserve(acc.size());
  for (const auto& [cell, a] : acc) out.cells.emplace_back(cell, a / total);
  return out;
}

}  // namespace

const char* to_string(LandUse kind) { return kind == LandUse::residential ? "residential" : "employment"; }

LandUse parse_land_use(const std::string& text)
{
  if (text == "residential") return LandUse::residential;
  if (text == "employment" || text == "commercial" || text == "industrial") return LandUse::employment;
  throw std::invalid_argument("unknown land use '" + text + "'");
}

HourlyCounts CellCounts::counts(LandUse kind, CellId cell) const
{
  const auto& m = layer(kind);
  const auto it = m.find(cell);
  if (it == m.end()) return HourlyCounts{};
  return it->second;
}

CellCounts interpolate(const std::vector<CountZone>& zones, const std::vector<AuxiliaryZone>& aux,
                       const Grid& grid, LandUse kind, DasymetricDiagnostics* diagnostics, unsigned threads)
{
  std::vector<const AuxiliaryZone*> matching;
  std::vector<MultiPolygon> shapes;
  for (const AuxiliaryZone& a : aux) {
    if (a.land_use != kind) continue;
    matching.push_back(&a);
    shapes.push_back(a.geometry);
  }
  const PolygonIndex index(shapes);

  std::vector<const CountZone*> order;
  order.reserve(zones.size());
  for (const CountZone& z : zones) order.push_back(&z);
  std::sort(order.begin(), order.end(), [](const CountZone* a, const CountZone* b) { return a->id < b->id; });

  auto zone_counts = [kind](const CountZone& z) -> const HourlyCounts& {
    return kind == LandUse::residential ? z.workers : z.jobs;
  };

  std::vector<ZoneWeights> weights(order.size());
  parallel_for(order.size(), threads, [&](std::size_t i) {
    if (!has_mass(zone_counts(*order[i]))) return;
    weights[i] = zone_weights(*order[i], matching, index, grid);
  });

  CellCounts out(grid);
  auto& layer = out.layer(kind);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const CountZone& zone = *order[i];
    const HourlyCounts& y = zone_counts(zone);
    if (weights[i].fallback && diagnostics) {
      diagnostics->fallback_zones.push_back(zone.id);
      diagnostics->warnings.push_back("zone " + zone.id + " has " + to_string(kind) +
                                      " counts but no " + to_string(kind) +
                                      " parcels; spread by zone area");
    }
    for (const auto& [cell, fraction] : weights[i].cells) {
      auto [it, inserted] = layer.try_emplace(cell);
      if (inserted) it->second.fill(0.0);
      for (int t = 0; t < kHours; ++t) it->second[t] += y[t] * fraction;
    }
  }
  return out;
}

CellCounts filter_active_cells(CellCounts cc)
{
  cc.active_residential.clear();
  cc.active_employment.clear();
  for (const auto& [cell, h] : cc.workers) {
    if (daily_total(h) > kActivityThreshold) cc.active_residential.insert(cell);
  }
  for (const auto& [cell, h] : cc.jobs) {
    if (daily_total(h) > kActivityThreshold) cc.active_employment.insert(cell);
  }
  return cc;
}

CellCounts dasymetric_map(const std::vector<CountZone>& zones, const std::vector<AuxiliaryZone>& aux,
                          const Grid& grid, DasymetricDiagnostics* diagnostics, unsigned threads)
{
  CellCounts res = interpolate(zones, aux, grid, LandUse::residential, diagnostics, threads);
  CellCounts emp = interpolate(zones, aux, grid, LandUse::employment, diagnostics, threads);
  res.jobs = std::move(emp.jobs);
  return filter_active_cells(std::move(res));
}

std::vector<CountZone> build_count_zones(const FeatureLayer& layer, const ZoneHourly& workers,
                                         const ZoneHourly& jobs)
{
  std::map<std::string, CountZone> by_id;
  for (const Feature& f : layer.features) {
    auto [it, inserted] = by_id.try_emplace(f.id);
    if (!inserted) throw std::runtime_error("duplicate zone id " + f.id);
    it->second.id = f.id;
    it->second.geometry = f.geometry;
  }
  auto attach = [&](const ZoneHourly& table, const char* what, HourlyCounts CountZone::*field) {
    for (const auto& [id, h] : table) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw std::runtime_error(std::string(what) + " counts reference zone " + id +
                                 " which is absent from the zone geometry");
      }
      it->second.*field = h;
    }
  };
  attach(workers, "worker", &CountZone::workers);
  attach(jobs, "job", &CountZone::jobs);

  std::vector<CountZone> out;
  out.reserve(by_id.size());
  for (auto& [id, z] : by_id) out.push_back(std::move(z));
  return out;
}

std::vector<AuxiliaryZone> build_auxiliary_zones(const FeatureLayer& parcels)
{
  std::vector<AuxiliaryZone> out;
  for (const Feature& f : parcels.features) {
    const auto it = f.properties.find("land_use");
    if (it == f.properties.end()) throw std::runtime_error("parcel " + f.id + " has no land_use property");
    LandUse kind;
    try {
      kind = parse_land_use(it->second);
    } catch (const std::invalid_argument&) {
      continue;
    }
    out.push_back({f.id, f.geometry, kind});
  }
  return out;
}

void write_cell_counts(const std::filesystem::path& path, const CellCounts& cc)
{
  std::ofstream out = csv::open_output(path);
  out << "cell_col,cell_row,kind,hour,count\n";
  for (LandUse kind : {LandUse::residential, LandUse::employment}) {
    const char* name = kind == LandUse::residential ? "workers" : "jobs";
    for (const auto& [cell, h] : cc.layer(kind)) {
      const CellIndex c = cc.grid.index(cell);
      for (int t = 0; t < kHours; ++t) {
        out << c.col << ',' << c.row << ',' << name << ',' << t << ',' << csv::format_double(h[t]) << '\n';
      }
    }
  }
}

CellCounts read_cell_counts(const std::filesystem::path& path, const Grid& grid)
{
  const csv::Table t = csv::read(path);
  const auto c_col = t.column("cell_col");
  const auto c_row = t.column("cell_row");
  const auto c_kind = t.column("kind");
  const auto c_hour = t.column("hour");
  const auto c_count = t.column("count");
  CellCounts cc(grid);
  for (const csv::Row& row : t.rows) {
    const CellIndex idx{static_cast<int>(t.integer(row, c_col)), static_cast<int>(t.integer(row, c_row))};
    const std::string& kind = t.field(row, c_kind);
    LandUse lu;
    if (kind == "workers") {
      lu = LandUse::residential;
    } else if (kind == "jobs") {
      lu = LandUse::employment;
    } else {
      throw std::runtime_error(path.string() + ":" + std::to_string(row.line) + ": unknown kind '" + kind + "'");
    }
    const long long hour = t.integer(row, c_hour);
    if (hour < 0 || hour >= kHours) {
      throw std::runtime_error(path.string() + ":" + std::to_string(row.line) + ": hour out of range");
    }
    auto [it, inserted] = cc.layer(lu).try_emplace(grid.id(idx));
    if (inserted) it->second.fill(0.0);
    it->second[hour] = t.number(row, c_count);
  }
  return filter_active_cells(std::move(cc));
}

DasymetricSummary summarize(const std::vector<CountZone>& zones, const CellCounts& cc,
                            const DasymetricDiagnostics& diagnostics)
{
  DasymetricSummary s;
  s.zones_in = zones.size();
  s.cells_active_residential = cc.active_residential.size();
  s.cells_active_employment = cc.active_employment.size();
  for (const CountZone& z : zones) {
    s.mass_in_workers += daily_total(z.workers);
    s.mass_in_jobs += daily_total(z.jobs);
  }
  for (const auto& [cell, h] : cc.workers) s.mass_out_workers += daily_total(h);
  for (const auto& [cell, h] : cc.jobs) s.mass_out_jobs += daily_total(h);
  s.fallback_zones = diagnostics.fallback_zones;
  return s;
}

std::string to_json(const DasymetricSummary& s)
{
  nlohmann::ordered_json j;
  j["zones_in"] = s.zones_in;
  j["cells_active_residential"] = s.cells_active_residential;
  j["cells_active_employment"] = s.cells_active_employment;
  j["mass_in"] = {{"workers", s.mass_in_workers}, {"jobs", s.mass_in_jobs}};
  j["mass_out"] = {{"workers", s.mass_out_workers}, {"jobs", s.mass_out_jobs}};
  j["fallback_zones"] = s.fallback_zones;
  return j.dump(2);
}

}  // namespace stacc
