#include "stacc/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "stacc/accessibility.hpp"
#include "stacc/csv.hpp"
#include "stacc/cube.hpp"
#include "stacc/dasymetric.hpp"
#include "stacc/geojson.hpp"
#include "stacc/network.hpp"
#include "stacc/temporal.hpp"

namespace stacc {

using ojson = nlohmann::ordered_json;

namespace artifact {

std::string surfaces(int scenario) { return "surfaces_s" + std::to_string(scenario) + ".csv"; }

std::string slice(int hour)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "slices/slice_%02d.csv", hour);
  return buf;
}

std::string summary(const std::string& stage) { return stage + ".json"; }

}  // namespace artifact

namespace {

// Stage name, summary file, entry point; in execution order.
struct StageInfo {
  const char* name;
  const char* summary;
  void (*run)(const RunConfig&);
};

const StageInfo kStages[] = {
    {"temporal", "temporal.json", run_temporal_stage},     {"grid", "grid.json", run_grid_stage},
    {"dasymetric", "dasymetric.json", run_dasymetric_stage}, {"odmatrix", "odmatrix.json", run_odmatrix_stage},
    {"calibrate", "calibration.json", run_calibrate_stage}, {"access", "scenarios.json", run_access_stage},
    {"cube", "cube.json", run_cube_stage},
};

std::filesystem::path out(const RunConfig& c, const std::string& name) { return c.output / name; }

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream f = csv::open_output(path);
  f << text << '\n';
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

ojson read_json(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing artifact " + path.string() + " (run the earlier stage first)");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::filesystem::path need(const std::filesystem::path& path)
{
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing artifact " + path.string() + " (run the earlier stage first)");
  }
  return path;
}

ojson hourly_array(const HourlyCounts& h) { return ojson(std::vector<double>(h.begin(), h.end())); }

HourlyCounts column_sums(const ZoneHourly& z)
{
  HourlyCounts total{};
  for (const auto& [id, h] : z) total += h;
  return total;
}

double snap_tolerance(const RunConfig& c) { return c.snap_tolerance > 0 ? c.snap_tolerance : 2 * c.cell_size; }

std::string hourly_matrix_pattern(const RunConfig& c)
{
  if (!c.hourly_costs.empty()) return c.hourly_costs;
  return out(c, artifact::od_hourly).string();
}

}  // namespace

void write_grid(const std::filesystem::path& path, const Grid& g)
{
  ojson j;
  j["origin_x"] = g.origin_x();
  j["origin_y"] = g.origin_y();
  j["cell_size"] = g.cell_size();
  j["nx"] = g.nx();
  j["ny"] = g.ny();
  write_text(path, j.dump(2));
}

Grid read_grid(const std::filesystem::path& path)
{
  const ojson j = read_json(path);
  try {
    return Grid(j.at("origin_x").get<double>(), j.at("origin_y").get<double>(), j.at("cell_size").get<double>(),
                j.at("nx").get<int>(), j.at("ny").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": bad grid descriptor: " + e.what());
  }
}

void run_temporal_stage(const RunConfig& c)
{
  const ZoneHourly workers = disaggregate_table(read_count_table(c.workers));
  const ZoneHourly jobs = disaggregate_table(read_count_table(c.jobs));
  write_zone_hourly(out(c, artifact::zone_workers), workers);
  write_zone_hourly(out(c, artifact::zone_jobs), jobs);

  const HourlyCounts w = column_sums(workers), j = column_sums(jobs);
  ojson s;
  s["zones_with_workers"] = workers.size();
  s["zones_with_jobs"] = jobs.size();
  s["workers_total"] = daily_total(w);
  s["jobs_total"] = daily_total(j);
  s["workers_by_hour"] = hourly_array(w);
  s["jobs_by_hour"] = hourly_array(j);
  write_text(out(c, "temporal.json"), s.dump(2));
}

void run_grid_stage(const RunConfig& c)
{
  const FeatureLayer zones = read_feature_layer(c.zones);
  if (zones.features.empty()) throw std::runtime_error("zone layer is empty");
  Box extent = bounds(zones.features.front().geometry);
  for (const Feature& f : zones.features) {
    const Box b = bounds(f.geometry);
    extent.min_x = std::min(extent.min_x, b.min_x);
    extent.min_y = std::min(extent.min_y, b.min_y);
    extent.max_x = std::max(extent.max_x, b.max_x);
    extent.max_y = std::max(extent.max_y, b.max_y);
  }
  write_grid(out(c, artifact::grid), tessellate_grid(extent, c.cell_size));
}

void run_dasymetric_stage(const RunConfig& c)
{
  const Grid grid = read_grid(out(c, artifact::grid));
  const ZoneHourly workers = read_zone_hourly(need(out(c, artifact::zone_workers)));
  const ZoneHourly jobs = read_zone_hourly(need(out(c, artifact::zone_jobs)));
  const auto zones = build_count_zones(read_feature_layer(c.zones), workers, jobs);
  const auto parcels = build_auxiliary_zones(read_feature_layer(c.parcels));

  DasymetricDiagnostics diag;
  const CellCounts cc = dasymetric_map(zones, parcels, grid, &diag, c.threads);
  write_cell_counts(out(c, artifact::cells), cc);

  ojson s = ojson::parse(to_json(summarize(zones, cc, diag)));
  s["parcels_in"] = parcels.size();
  s["warnings"] = diag.warnings;
  write_text(out(c, "dasymetric.json"), s.dump(2));
}

void run_odmatrix_stage(const RunConfig& c)
{
  const Grid grid = read_grid(out(c, artifact::grid));
  const CellCounts cc = read_cell_counts(need(out(c, artifact::cells)), grid);
  const std::vector<CellId> origins(cc.active_residential.begin(), cc.active_residential.end());
  const std::vector<CellId> destinations(cc.active_employment.begin(), cc.active_employment.end());

  std::vector<std::string> warnings;
  const RoadGraph graph = load_network(c.nodes, c.edges, c.directed, &warnings);
  OdOptions opts;
  opts.snap_tolerance = snap_tolerance(c);
  opts.threads = c.threads;
  const CostMatrix m = od_matrix(graph, origins, destinations, grid, opts);
  write_cost_matrix(out(c, artifact::od_static), m);

  std::size_t unreachable = 0;
  for (double v : m.values) unreachable += is_unreachable(v);
  if (c.hourly_from_edges) {
    for (int h = 0; h < kHours; ++h) {
      opts.weight = EdgeWeight::at_hour(h);
      write_cost_matrix(hourly_path(out(c, artifact::od_hourly).string(), h),
                        od_matrix(graph, origins, destinations, grid, opts));
    }
  }

  ojson s;
  s["nodes"] = graph.node_count();
  s["edges"] = graph.edge_count();
  s["components"] = graph.component_sizes();
  s["origins"] = m.rows();
  s["destinations"] = m.cols();
  s["unreachable_pairs"] = unreachable;
  s["hourly_matrices"] = c.hourly_from_edges ? "edges" : (c.hourly_costs.empty() ? "none" : "files");
  s["warnings"] = warnings;
  write_text(out(c, "odmatrix.json"), s.dump(2));
}

void run_calibrate_stage(const RunConfig& c)
{
  ojson s;
  if (!c.calibrate()) {
    s["source"] = "config";
    s["beta"] = *c.beta;
    write_text(out(c, artifact::calibration), s.dump(2));
    return;
  }
  if (c.flows.empty()) throw std::runtime_error("beta is \"calibrate\" but no flow file is configured");

  const FeatureLayer layer = read_feature_layer(c.zones);
  const ZoneHourly workers = read_zone_hourly(need(out(c, artifact::zone_workers)));
  const ZoneHourly jobs = read_zone_hourly(need(out(c, artifact::zone_jobs)));
  std::map<std::string, std::size_t> index;
  std::vector<Point> centroids;
  for (const Feature& f : layer.features) {
    index.emplace(f.id, centroids.size());
    centroids.push_back(centroid(f.geometry));
  }
  const RoadGraph graph = load_network(c.nodes, c.edges, c.directed);
  const CostMatrix d =
      od_matrix_points(graph, centroids, centroids, snap_tolerance(c), EdgeWeight::length(), c.threads);

  auto total = [](const ZoneHourly& z, const std::string& id) {
    const auto it = z.find(id);
    return it == z.end() ? 0.0 : daily_total(it->second);
  };
  std::vector<FlowObservation> obs;
  for (const FlowRecord& f : read_flows(c.flows)) {
    const auto o = index.find(f.origin), t = index.find(f.destination);
    if (o == index.end() || t == index.end()) {
      throw std::runtime_error("flow " + f.origin + " -> " + f.destination + " names an unknown zone");
    }
    obs.push_back({f.commuters, total(workers, f.origin), total(jobs, f.destination), d.at(o->second, t->second)});
  }
  const FrictionFit fit = fit_friction(obs, c.distance_floor);
  s["source"] = "flows";
  s["beta"] = fit.beta;
  s["fit"] = ojson::parse(to_json(fit));
  write_text(out(c, artifact::calibration), s.dump(2));
}

void run_access_stage(const RunConfig& c)
{
  const Grid grid = read_grid(out(c, artifact::grid));
  const CellCounts cc = read_cell_counts(need(out(c, artifact::cells)), grid);
  CostSet costs;
  costs.static_costs = read_cost_matrix(need(out(c, artifact::od_static)));
  if (c.time_varying()) costs.hourly = load_time_varying_costs(hourly_matrix_pattern(c));

  const ojson cal = read_json(out(c, artifact::calibration));
  DecaySchedule decay;
  decay.base = {c.decay, cal.at("beta").get<double>(), c.distance_floor};
  decay.hourly_beta = c.hourly_beta;

  const ScenarioReport report = run_scenarios(cc, costs, decay, c.threads);
  write_surfaces(out(c, artifact::surfaces(1)), grid, {report.static_surface});
  for (int s = 2; s <= 4; ++s) write_surfaces(out(c, artifact::surfaces(s)), grid, report.scenario(s));

  ojson s = ojson::parse(to_json(report));
  s["beta"] = decay.base.beta;
  s["residential_cells"] = cc.active_residential.size();
  s["employment_cells"] = cc.active_employment.size();
  write_text(out(c, artifact::scenarios), s.dump(2));
}

void run_cube_stage(const RunConfig& c)
{
  const Grid grid = read_grid(out(c, artifact::grid));
  const auto surfaces = read_surfaces(need(out(c, artifact::surfaces(4))), grid);
  const SpaceTimeCube cube = assemble_cube(surfaces, grid);
  write_cube(cube, out(c, artifact::cube));
  for (int t = 0; t < cube.nt(); ++t) write_cube_slice(cube, t, out(c, artifact::slice(t)));

  std::vector<double> valid;
  for (double v : cube.values()) {
    if (!is_sentinel(v)) valid.push_back(v);
  }
  ojson s;
  s["nx"] = cube.nx();
  s["ny"] = cube.ny();
  s["nt"] = cube.nt();
  s["voxels"] = cube.voxel_count();
  s["valid_voxels"] = valid.size();
  s["iso_percentile"] = c.iso_percentile;
  if (valid.empty()) {
    s["isovalue"] = nullptr;
    s["mesh_vertices"] = 0;
    s["mesh_triangles"] = 0;
    std::filesystem::remove(out(c, artifact::mesh));
  } else {
    const double iso = percentile(valid, c.iso_percentile);
    const TriangleMesh mesh = isosurface(cube, iso);
    write_mesh_obj(mesh, cube, out(c, artifact::mesh));
    s["value_min"] = *std::min_element(valid.begin(), valid.end());
    s["value_max"] = *std::max_element(valid.begin(), valid.end());
    s["isovalue"] = iso;
    s["mesh_vertices"] = mesh.vertices.size();
    s["mesh_triangles"] = mesh.triangles.size();
  }
  write_text(out(c, "cube.json"), s.dump(2));
}

void run_stage(const std::string& name, const RunConfig& c)
{
  for (const StageInfo& st : kStages) {
    if (name != st.name) continue;
    try {
      st.run(c);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    return;
  }
  throw std::invalid_argument("unknown stage '" + name + "'");
}

std::string assemble_report(const RunConfig& c)
{
  ojson r;
  r["parameters"] = {{"cell_size", c.cell_size},
                     {"decay", to_string(c.decay)},
                     {"beta", c.beta ? ojson(*c.beta) : ojson("calibrate")},
                     {"hourly_beta", c.hourly_beta},
                     {"distance_floor", c.distance_floor},
                     {"snap_tolerance", snap_tolerance(c)},
                     {"time_varying", c.time_varying()},
                     {"iso_percentile", c.iso_percentile}};
  ojson stages;
  for (const StageInfo& st : kStages) stages[st.name] = read_json(out(c, st.summary));
  r["stages"] = stages;
  const std::string text = r.dump(2);
  write_text(out(c, artifact::report), text);
  return text;
}

std::string run_pipeline(const RunConfig& c, std::ostream* log)
{
  const ValidationReport v = validate(c);
  if (log) {
    for (const ValidationIssue& i : v.issues) {
      if (i.severity == Severity::warning) *log << "warning: " << i.message << '\n';
    }
  }
  if (!v.ok()) throw ValidationFailed(v);

  std::filesystem::create_directories(c.output);
  ojson timings;
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (const StageInfo& st : kStages) {
    if (log) *log << "[" << st.name << "] running" << std::endl;
    const auto t0 = clock::now();
    run_stage(st.name, c);
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    timings[st.name] = secs;
    if (log) *log << "[" << st.name << "] done in " << secs << " s" << std::endl;
  }
  timings["total"] = std::chrono::duration<double>(clock::now() - start).count();
  write_text(out(c, artifact::timings), timings.dump(2));
  return assemble_report(c);
}

}  // namespace stacc
