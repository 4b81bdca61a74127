// Gravity-based job accessibility: Hansen, two-step (supply/demand ratio then
// gather) static and hourly variants, the four-scenario comparison and
// correlation analysis.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stacc/calibration.hpp"
#include "stacc/dasymetric.hpp"
#include "stacc/network.hpp"

namespace stacc {

/// Values attached to a list of cells (supply per job cell, workers per
/// residential cell, ...).
struct CellField {
  std::vector<CellId> cells;
  std::vector<double> values;
};

/// Accessibility per active residential cell; hour is empty for static runs.
struct AccessibilitySurface {
  std::optional<int> hour;
  std::vector<CellId> cells;
  std::vector<double> values;
};

/// Supply-to-demand ratio per employment cell, with the demand potential
/// that formed its denominator.
struct RatioSurface {
  std::optional<int> hour;
  std::vector<CellId> cells;
  std::vector<double> ratios;
  std::vector<double> demand_potential;
};

/// Decay weights laid out residential rows x employment columns.
class WeightMatrix {
 public:
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), w_(rows * cols, fill)
  {
  }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {w_.data() + i * cols_, cols_}; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> w_;
};

/// Looks up every (residential, employment) pair in `costs` and applies the
/// decay. Throws when a cell is missing from the matrix rows or columns.
WeightMatrix weight_matrix(const CostMatrix& costs, const std::vector<CellId>& residential,
                           const std::vector<CellId>& employment, const DecaySpec& decay);

struct AccessDiagnostics {
  /// Employment cells (summed over slices) whose demand potential was 0;
  /// their ratio is set to 0.
  std::size_t zero_demand_ratios = 0;
  /// Hours in which no worker was present anywhere.
  std::vector<int> zero_worker_hours;
  std::vector<std::string> messages;
};

// Kernels over aligned arrays. supply has one entry per column, demand one
// per row.
std::vector<double> hansen_kernel(std::span<const double> supply, const WeightMatrix& w, unsigned threads = 0);
RatioSurface ratio_kernel(std::span<const double> supply, std::span<const double> demand, const WeightMatrix& w,
                          AccessDiagnostics* diagnostics = nullptr);
std::vector<double> gather_kernel(std::span<const double> ratios, const WeightMatrix& w, unsigned threads = 0);

/// A_i = sum_j S_j f(d_ij), over the matrix's origin cells.
AccessibilitySurface hansen(const CellField& supply, const CostMatrix& costs, const DecaySpec& decay);

/// A_i = sum_j S_j f(d_ij) / D_j with D_j = sum_k P_k f(d_kj).
AccessibilitySurface shen_static(const CellField& supply, const CellField& demand, const CostMatrix& costs,
                                 const DecaySpec& decay, AccessDiagnostics* diagnostics = nullptr);

/// Impedances either static or one matrix per departure hour.
struct CostSet {
  std::optional<CostMatrix> static_costs;
  std::vector<CostMatrix> hourly;  // empty or 24

  bool time_varying() const { return !hourly.empty(); }
  const CostMatrix& for_hour(int hour) const;
  const CostMatrix& daily() const;
};

/// Decay, optionally with a separate beta per hour.
struct DecaySchedule {
  DecaySpec base;
  std::vector<double> hourly_beta;  // empty or 24

  DecaySpec at(int hour) const;
  bool uniform() const { return hourly_beta.empty(); }
};

/// Hourly space-time accessibility: supply is the two-hour job window
/// starting at `hour`, demand the workers departing in `hour`.
AccessibilitySurface spacetime_access(const CellCounts& cc, const CostSet& costs, const DecaySchedule& decay,
                                      int hour, AccessDiagnostics* diagnostics = nullptr);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct ScenarioReport {
  /// 1: static jobs & workers; 2: windowed hourly jobs vs daily workers;
  /// 3: daily jobs vs hourly workers; 4: hourly jobs & workers.
  AccessibilitySurface static_surface;
  std::array<std::vector<AccessibilitySurface>, 3> hourly;  // scenarios 2..4, 24 each
  std::array<double, 4> means{};
  /// Lower triangle, correlations[i][j] for j < i. Empty when a scenario
  /// has zero variance.
  std::array<std::array<std::optional<double>, 4>, 4> correlations{};
  AccessDiagnostics diagnostics;

  const std::vector<AccessibilitySurface>& scenario(int s) const { return hourly.at(s - 2); }
};

/// Hour slices run in parallel; results do not depend on `threads`.
ScenarioReport run_scenarios(const CellCounts& cc, const CostSet& costs, const DecaySchedule& decay,
                             unsigned threads = 0);

/// `{means: [4], correlations: [[...]] (lower triangle rows), diagnostics}`.
std::string to_json(const ScenarioReport& report);

/// `cell_col,cell_row,hour,value`; static surfaces write hour as `static`.
void write_surfaces(const std::filesystem::path& path, const Grid& grid,
                    const std::vector<AccessibilitySurface>& surfaces);
std::vector<AccessibilitySurface> read_surfaces(const std::filesystem::path& path, const Grid& grid);

}  // namespace stacc
