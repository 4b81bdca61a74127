#include "stacc/accessibility.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "stacc/csv.hpp"
#include "stacc/parallel.hpp"

namespace stacc {

namespace {

/// Neumaier compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v)
  {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::unordered_map<CellId, std::size_t> positions(const std::vector<CellId>& ids)
{
  std::unordered_map<CellId, std::size_t> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
  return out;
}

void check_field(const CellField& f, const char* what)
{
  if (f.cells.size() != f.values.size()) {
    throw std::invalid_argument(std::string(what) + ": cells and values differ in length");
  }
  for (double v : f.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be non-negative");
  }
}

double mean_of(std::span<const double> v)
{
  if (v.empty()) return 0.0;
  Accumulator acc;
  for (double x : v) acc.add(x);
  return acc.value() / static_cast<double>(v.size());
}

}  // namespace

WeightMatrix weight_matrix(const CostMatrix& costs, const std::vector<CellId>& residential,
                           const std::vector<CellId>& employment, const DecaySpec& spec)
{
  const auto rows = positions(costs.origins);
  const auto cols = positions(costs.destinations);
  std::vector<std::size_t> ri(residential.size()), cj(employment.size());
  for (std::size_t i = 0; i < residential.size(); ++i) {
    const auto it = rows.find(residential[i]);
    if (it == rows.end()) {
      throw std::invalid_argument("cost matrix has no row for residential cell " + std::to_string(residential[i]));
    }
    ri[i] = it->second;
  }
  for (std::size_t j = 0; j < employment.size(); ++j) {
    const auto it = cols.find(employment[j]);
    if (it == cols.end()) {
      throw std::invalid_argument("cost matrix has no column for employment cell " +
                                  std::to_string(employment[j]));
    }
    cj[j] = it->second;
  }
  WeightMatrix w(residential.size(), employment.size());
  for (std::size_t i = 0; i < ri.size(); ++i) {
    for (std::size_t j = 0; j < cj.size(); ++j) w(i, j) = decay(spec, costs.at(ri[i], cj[j]));
  }
  return w;
}

std::vector<double> hansen_kernel(std::span<const double> supply, const WeightMatrix& w, unsigned threads)
{
  if (supply.size() != w.cols()) throw std::invalid_argument("supply length does not match weight columns");
  return gather_kernel(supply, w, threads);
}

RatioSurface ratio_kernel(std::span<const double> supply, std::span<const double> demand, const WeightMatrix& w,
                          AccessDiagnostics* diagnostics)
{
  if (supply.size() != w.cols() || demand.size() != w.rows()) {
    throw std::invalid_argument("supply/demand lengths do not match the weight matrix");
  }
  std::vector<Accumulator> potential(w.cols());
  for (std::size_t k = 0; k < w.rows(); ++k) {
    const double p = demand[k];
    if (p == 0.0) continue;
    const auto row = w.row(k);
    for (std::size_t j = 0; j < w.cols(); ++j) potential[j].add(p * row[j]);
  }
  RatioSurface out;
  out.ratios.resize(w.cols());
  out.demand_potential.resize(w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    const double d = potential[j].value();
    out.demand_potential[j] = d;
    if (d > 0.0) {
      out.ratios[j] = supply[j] / d;
    } else {
      out.ratios[j] = 0.0;
      if (diagnostics) ++diagnostics->zero_demand_ratios;
    }
  }
  return out;
}

std::vector<double> gather_kernel(std::span<const double> ratios, const WeightMatrix& w, unsigned threads)
{
  if (ratios.size() != w.cols()) throw std::invalid_argument("ratio length does not match weight columns");
  std::vector<double> out(w.rows());
  parallel_for(w.rows(), threads, [&](std::size_t i) {
    Accumulator acc;
    const auto row = w.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) acc.add(ratios[j] * row[j]);
    out[i] = acc.value();
  });
  return out;
}

AccessibilitySurface hansen(const CellField& supply, const CostMatrix& costs, const DecaySpec& spec)
{
  check_field(supply, "supply");
  const WeightMatrix w = weight_matrix(costs, costs.origins, supply.cells, spec);
  AccessibilitySurface out;
  out.cells = costs.origins;
  out.values = hansen_kernel(supply.values, w, 1);
  return out;
}

AccessibilitySurface shen_static(const CellField& supply, const CellField& demand, const CostMatrix& costs,
                                 const DecaySpec& spec, AccessDiagnostics* diagnostics)
{
  check_field(supply, "supply");
  check_field(demand, "demand");
  const WeightMatrix w = weight_matrix(costs, demand.cells, supply.cells, spec);
  const RatioSurface r = ratio_kernel(supply.values, demand.values, w, diagnostics);
  AccessibilitySurface out;
  out.cells = demand.cells;
  out.values = gather_kernel(r.ratios, w, 1);
  return out;
}

const CostMatrix& CostSet::for_hour(int hour) const
{
  if (hour < 0 || hour >= kHours) throw std::out_of_range("hour " + std::to_string(hour) + " outside 0..23");
  if (!hourly.empty()) {
    if (hourly.size() != static_cast<std::size_t>(kHours)) {
      throw std::invalid_argument("time-varying costs need 24 hourly matrices, got " +
                                  std::to_string(hourly.size()));
    }
    return hourly[hour];
  }
  if (!static_costs) throw std::invalid_argument("no cost matrix available");
  return *static_costs;
}

const CostMatrix& CostSet::daily() const
{
  if (!static_costs) throw std::invalid_argument("static cost matrix required for the daily model");
  return *static_costs;
}

DecaySpec DecaySchedule::at(int hour) const
{
  if (hourly_beta.empty()) return base;
  if (hourly_beta.size() != static_cast<std::size_t>(kHours)) {
    throw std::invalid_argument("hourly beta list must have 24 entries");
  }
  DecaySpec s = base;
  s.beta = hourly_beta.at(hour);
  return s;
}

namespace {

struct ActiveCells {
  std::vector<CellId> residential;
  std::vector<CellId> employment;
  std::vector<HourlyCounts> workers;
  std::vector<HourlyCounts> jobs;
};

ActiveCells active_cells(const CellCounts& cc)
{
  ActiveCells a;
  a.residential.assign(cc.active_residential.begin(), cc.active_residential.end());
  a.employment.assign(cc.active_employment.begin(), cc.active_employment.end());
  for (CellId c : a.residential) a.workers.push_back(cc.counts(LandUse::residential, c));
  for (CellId c : a.employment) a.jobs.push_back(cc.counts(LandUse::employment, c));
  return a;
}

AccessibilitySurface hourly_slice(const ActiveCells& a, const WeightMatrix& w, std::span<const double> supply,
                                  std::span<const double> demand, int hour, AccessDiagnostics* diag,
                                  unsigned threads)
{
  const RatioSurface r = ratio_kernel(supply, demand, w, diag);
  AccessibilitySurface out;
  out.hour = hour;
  out.cells = a.residential;
  out.values = gather_kernel(r.ratios, w, threads);
  return out;
}

void note_zero_workers(std::span<const double> demand, int hour, AccessDiagnostics* diag)
{
  if (!diag) return;
  if (std::all_of(demand.begin(), demand.end(), [](double v) { return v == 0.0; })) {
    diag->zero_worker_hours.push_back(hour);
    diag->messages.push_back("no workers depart in hour " + std::to_string(hour) +
                             "; accessibility is zero for that hour");
  }
}

}  // namespace

AccessibilitySurface spacetime_access(const CellCounts& cc, const CostSet& costs, const DecaySchedule& decay,
                                      int hour, AccessDiagnostics* diagnostics)
{
  if (hour < 0 || hour >= kHours) throw std::out_of_range("hour " + std::to_string(hour) + " outside 0..23");
  const ActiveCells a = active_cells(cc);
  const WeightMatrix w = weight_matrix(costs.for_hour(hour), a.residential, a.employment, decay.at(hour));
  std::vector<double> supply, demand;
  for (const HourlyCounts& h : a.jobs) supply.push_back(supply_window(h, hour));
  for (const HourlyCounts& h : a.workers) demand.push_back(h[hour]);
  note_zero_workers(demand, hour, diagnostics);
  return hourly_slice(a, w, supply, demand, hour, diagnostics, 1);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw std::invalid_argument("correlation samples differ in length");
  if (a.size() < 3) throw std::invalid_argument("correlation needs at least 3 paired samples");
  const double ma = mean_of(a), mb = mean_of(b);
  Accumulator sab, saa, sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab.add(da * db);
    saa.add(da * da);
    sbb.add(db * db);
  }
  if (!(saa.value() > 0.0) || !(sbb.value() > 0.0)) throw std::invalid_argument("correlation: zero variance");
  const double r = sab.value() / std::sqrt(saa.value() * sbb.value());
  return std::clamp(r, -1.0, 1.0);
}

ScenarioReport run_scenarios(const CellCounts& cc, const CostSet& costs, const DecaySchedule& decay,
                             unsigned threads)
{
  const ActiveCells a = active_cells(cc);
  const std::size_t n_res = a.residential.size();

  std::vector<double> daily_workers, daily_jobs;
  for (const HourlyCounts& h : a.workers) daily_workers.push_back(daily_total(h));
  for (const HourlyCounts& h : a.jobs) daily_jobs.push_back(daily_total(h));

  ScenarioReport report;
  const auto static_w = std::make_shared<WeightMatrix>(
      weight_matrix(costs.daily(), a.residential, a.employment, decay.base));
  {
    const RatioSurface r = ratio_kernel(daily_jobs, daily_workers, *static_w, &report.diagnostics);
    report.static_surface.cells = a.residential;
    report.static_surface.values = gather_kernel(r.ratios, *static_w, threads);
  }

  const bool shared_weights = !costs.time_varying() && decay.uniform();
  for (auto& s : report.hourly) s.resize(kHours);
  std::vector<AccessDiagnostics> hour_diag(kHours);

  parallel_for(kHours, threads, [&](std::size_t slot) {
    const int t = static_cast<int>(slot);
    std::shared_ptr<const WeightMatrix> w = static_w;
    if (!shared_weights) {
      w = std::make_shared<WeightMatrix>(weight_matrix(costs.for_hour(t), a.residential, a.employment, decay.at(t)));
    }
    std::vector<double> window_jobs, hour_workers;
    for (const HourlyCounts& h : a.jobs) window_jobs.push_back(supply_window(h, t));
    for (const HourlyCounts& h : a.workers) hour_workers.push_back(h[t]);
    note_zero_workers(hour_workers, t, &hour_diag[t]);

    report.hourly[0][t] = hourly_slice(a, *w, window_jobs, daily_workers, t, &hour_diag[t], 1);
    report.hourly[1][t] = hourly_slice(a, *w, daily_jobs, hour_workers, t, &hour_diag[t], 1);
    report.hourly[2][t] = hourly_slice(a, *w, window_jobs, hour_workers, t, &hour_diag[t], 1);
  });
  for (const AccessDiagnostics& d : hour_diag) {
    report.diagnostics.zero_demand_ratios += d.zero_demand_ratios;
    report.diagnostics.zero_worker_hours.insert(report.diagnostics.zero_worker_hours.end(),
                                                d.zero_worker_hours.begin(), d.zero_worker_hours.end());
    report.diagnostics.messages.insert(report.diagnostics.messages.end(), d.messages.begin(), d.messages.end());
  }

  // Pooled (hour, cell) samples; the static surface is repeated for every hour.
  std::array<std::vector<double>, 4> samples;
  for (int t = 0; t < kHours; ++t) {
    samples[0].insert(samples[0].end(), report.static_surface.values.begin(), report.static_surface.values.end());
    for (int s = 0; s < 3; ++s) {
      const auto& v = report.hourly[s][t].values;
      samples[s + 1].insert(samples[s + 1].end(), v.begin(), v.end());
    }
  }
  report.means[0] = mean_of(report.static_surface.values);
  for (int s = 1; s < 4; ++s) report.means[s] = mean_of(samples[s]);
  if (n_res == 0) report.diagnostics.messages.push_back("no active residential cells");

  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      try {
        report.correlations[i][j] = pearson_correlation(samples[i], samples[j]);
      } catch (const std::invalid_argument& e) {
        report.diagnostics.messages.push_back("correlation s" + std::to_string(i + 1) + "/s" +
                                              std::to_string(j + 1) + " undefined: " + e.what());
      }
    }
  }
  return report;
}

std::string to_json(const ScenarioReport& report)
{
  nlohmann::ordered_json j;
  j["scenarios"] = {"static jobs and workers", "dynamic jobs, static workers", "dynamic workers, static jobs",
                    "dynamic jobs and workers"};
  j["means"] = report.means;
  nlohmann::ordered_json corr = nlohmann::ordered_json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int k = 0; k < i; ++k) {
      if (report.correlations[i][k]) {
        row.push_back(*report.correlations[i][k]);
      } else {
        row.push_back(nullptr);
      }
    }
    corr.push_back(row);
  }
  j["correlations"] = corr;
  j["diagnostics"] = {{"zero_demand_ratios", report.diagnostics.zero_demand_ratios},
                      {"zero_worker_hours", report.diagnostics.zero_worker_hours},
                      {"messages", report.diagnostics.messages}};
  return j.dump(2);
}

void write_surfaces(const std::filesystem::path& path, const Grid& grid,
                    const std::vector<AccessibilitySurface>& surfaces)
{
  std::ofstream out = csv::open_output(path);
  out << "cell_col,cell_row,hour,value\n";
  for (const AccessibilitySurface& s : surfaces) {
    const std::string hour = s.hour ? std::to_string(*s.hour) : "static";
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
      const CellIndex c = grid.index(s.cells[i]);
      out << c.col << ',' << c.row << ',' << hour << ',' << csv::format_double(s.values[i]) << '\n';
    }
  }
}

std::vector<AccessibilitySurface> read_surfaces(const std::filesystem::path& path, const Grid& grid)
{
  const csv::Table t = csv::read(path);
  const auto c_col = t.column("cell_col");
  const auto c_row = t.column("cell_row");
  const auto c_hour = t.column("hour");
  const auto c_value = t.column("value");
  std::vector<AccessibilitySurface> out;
  for (const csv::Row& row : t.rows) {
    const std::string& h = t.field(row, c_hour);
    std::optional<int> hour;
    if (h != "static") {
      const long long v = t.integer(row, c_hour);
      if (v < 0 || v >= kHours) {
        throw std::runtime_error(path.string() + ":" + std::to_string(row.line) + ": hour out of range");
      }
      hour = static_cast<int>(v);
    }
    if (out.empty() || out.back().hour != hour) {
      out.emplace_back();
      out.back().hour = hour;
    }
    const CellIndex idx{static_cast<int>(t.integer(row, c_col)), static_cast<int>(t.integer(row, c_row))};
    out.back().cells.push_back(grid.id(idx));
    out.back().values.push_back(t.number(row, c_value));
  }
  return out;
}

}  // namespace stacc
