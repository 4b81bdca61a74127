// Run configuration and input validation.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stacc/calibration.hpp"

namespace stacc {

struct RunConfig {
  std::filesystem::path zones;
  std::filesystem::path parcels;
  std::filesystem::path workers;
  std::filesystem::path jobs;
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path flows;  // needed only when calibrating
  /// Pattern containing `{hh}` naming 24 precomputed per-hour matrices.
  std::string hourly_costs;
  /// Derive 24 per-hour travel-time matrices from the edge file's t00..t23.
  bool hourly_from_edges = false;
  bool directed = false;

  double cell_size = 500.0;
  DecayFamily decay = DecayFamily::power;
  std::optional<double> beta = 1.0;  // empty: calibrate from flows
  std::vector<double> hourly_beta;
  double distance_floor = 250.0;
  double snap_tolerance = 0.0;  // 0: twice the cell size
  double iso_percentile = 95.0;
  unsigned threads = 0;
  std::filesystem::path output = "out";

  bool calibrate() const { return !beta.has_value(); }
  bool time_varying() const { return hourly_from_edges || !hourly_costs.empty(); }
};

/// JSON config. Relative paths resolve against `base_dir`. `beta` is a
/// number or the string "calibrate".
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

enum class Severity { warning, error };

struct ValidationIssue {
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool ok() const { return error_count() == 0; }
  void error(std::string msg) { issues.push_back({Severity::error, std::move(msg)}); }
  void warning(std::string msg) { issues.push_back({Severity::warning, std::move(msg)}); }
  std::string to_json() const;
};

/// Schema, CRS and id-reference checks across every input. Never throws for
/// bad inputs; problems are reported with a severity.
ValidationReport validate(const RunConfig& config);

}  // namespace stacc
