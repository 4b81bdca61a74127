// Dasymetric redistribution of zone-level hourly counts onto grid cells,
// weighted by the area of matching land-use parcels.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stacc/geojson.hpp"
#include "stacc/geometry.hpp"
#include "stacc/temporal.hpp"

namespace stacc {

enum class LandUse { residential, employment };

const char* to_string(LandUse kind);
/// Accepts residential / employment / commercial / industrial.
LandUse parse_land_use(const std::string& text);

struct CountZone {
  std::string id;
  MultiPolygon geometry;
  HourlyCounts workers{};
  HourlyCounts jobs{};
};

struct AuxiliaryZone {
  std::string id;
  MultiPolygon geometry;
  LandUse land_use = LandUse::residential;
};

/// Sparse per-cell hourly counts for both kinds plus activity flags.
struct CellCounts {
  Grid grid;
  std::map<CellId, HourlyCounts> workers;
  std::map<CellId, HourlyCounts> jobs;
  std::set<CellId> active_residential;
  std::set<CellId> active_employment;

  explicit CellCounts(const Grid& g) : grid(g) {}

  std::map<CellId, HourlyCounts>& layer(LandUse kind) { return kind == LandUse::residential ? workers : jobs; }
  const std::map<CellId, HourlyCounts>& layer(LandUse kind) const
  {
    return kind == LandUse::residential ? workers : jobs;
  }
  HourlyCounts counts(LandUse kind, CellId cell) const;
};

struct DasymetricDiagnostics {
  /// Zones that had a positive count but no matching land-use area and
  /// were spread by their own area instead.
  std::vector<std::string> fallback_zones;
  std::vector<std::string> warnings;
};

inline constexpr double kActivityThreshold = 1e-9;

/// For every hour and cell: sum over zones of
///   count_zone * area(parcels ∩ zone ∩ cell) / area(parcels ∩ zone),
/// using only parcels of the land use matching `kind`. Parcels are clipped
/// to the zone first. Per-zone weights are computed in parallel and reduced
/// in zone-id order, so results do not depend on the thread count.
CellCounts interpolate(const std::vector<CountZone>& zones, const std::vector<AuxiliaryZone>& aux,
                       const Grid& grid, LandUse kind, DasymetricDiagnostics* diagnostics = nullptr,
                       unsigned threads = 0);

/// Sets activity flags: a cell is active for a kind when its daily total
/// exceeds kActivityThreshold.
CellCounts filter_active_cells(CellCounts cc);

/// Both kinds plus filtering.
CellCounts dasymetric_map(const std::vector<CountZone>& zones, const std::vector<AuxiliaryZone>& aux,
                          const Grid& grid, DasymetricDiagnostics* diagnostics = nullptr,
                          unsigned threads = 0);

/// Joins zone geometry with hourly worker/job tables. Throws when a count
/// table names a zone absent from the geometry layer.
std::vector<CountZone> build_count_zones(const FeatureLayer& zones, const ZoneHourly& workers,
                                         const ZoneHourly& jobs);

/// Parcels need a `land_use` property; other classes are skipped.
std::vector<AuxiliaryZone> build_auxiliary_zones(const FeatureLayer& parcels);

/// `cell_col,cell_row,kind,hour,count`, cells in id order, kinds workers then jobs.
void write_cell_counts(const std::filesystem::path& path, const CellCounts& cc);
CellCounts read_cell_counts(const std::filesystem::path& path, const Grid& grid);

struct DasymetricSummary {
  std::size_t zones_in = 0;
  std::size_t cells_active_residential = 0;
  std::size_t cells_active_employment = 0;
  double mass_in_workers = 0.0;
  double mass_in_jobs = 0.0;
  double mass_out_workers = 0.0;
  double mass_out_jobs = 0.0;
  std::vector<std::string> fallback_zones;
};

DasymetricSummary summarize(const std::vector<CountZone>& zones, const CellCounts& cc,
                            const DasymetricDiagnostics& diagnostics);
std::string to_json(const DasymetricSummary& s);

}  // namespace stacc
