// Stage orchestration. Every stage reads its inputs from the config and the
// artifacts of earlier stages in the output directory, so each can be run
// on its own.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "stacc/config.hpp"
#include "stacc/geometry.hpp"

namespace stacc {

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage))
  {
  }
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Raised by run_pipeline when validation finds errors.
class ValidationFailed : public std::runtime_error {
 public:
  explicit ValidationFailed(ValidationReport report)
      : std::runtime_error("configuration failed validation"), report_(std::move(report))
  {
  }
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// File names inside the output directory.
namespace artifact {
inline constexpr const char* zone_workers = "zone_workers.csv";
inline constexpr const char* zone_jobs = "zone_jobs.csv";
inline constexpr const char* grid = "grid.json";
inline constexpr const char* cells = "cells.csv";
inline constexpr const char* od_static = "od_static.stm";
inline constexpr const char* od_hourly = "od/od_{hh}.stm";
inline constexpr const char* calibration = "calibration.json";
inline constexpr const char* scenarios = "scenarios.json";
inline constexpr const char* cube = "cube.stc";
inline constexpr const char* mesh = "isosurface.obj";
inline constexpr const char* report = "run_report.json";
inline constexpr const char* timings = "timings.json";
std::string surfaces(int scenario);  // surfaces_s<N>.csv
std::string slice(int hour);         // slices/slice_<hh>.csv
std::string summary(const std::string& stage);  // <stage>.json
}  // namespace artifact

void write_grid(const std::filesystem::path& path, const Grid& grid);
Grid read_grid(const std::filesystem::path& path);

// Each stage writes its artifacts plus a `<stage>.json` summary.
void run_temporal_stage(const RunConfig& config);
void run_grid_stage(const RunConfig& config);
void run_dasymetric_stage(const RunConfig& config);
void run_odmatrix_stage(const RunConfig& config);
void run_calibrate_stage(const RunConfig& config);
void run_access_stage(const RunConfig& config);
void run_cube_stage(const RunConfig& config);

/// Dispatches by name: temporal, grid, dasymetric, odmatrix, calibrate,
/// access, cube. Failures are rethrown as StageError.
void run_stage(const std::string& name, const RunConfig& config);

/// Validates, runs every stage in order, and writes run_report.json (stage
/// summaries only, byte-reproducible) and timings.json. Returns the report
/// text. Progress lines go to `log` when given.
std::string run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

/// Rebuilds run_report.json from the stage summaries on disk.
std::string assemble_report(const RunConfig& config);

}  // namespace stacc
