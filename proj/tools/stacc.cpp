// stacc: space-time job accessibility pipeline.
//
// Exit codes: 0 success, 1 validation failure, 2 compute failure.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stacc/config.hpp"
#include "stacc/pipeline.hpp"
#include "stacc/server.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kFailed = 2 };

/// Command-line values that override the config file.
struct Overrides {
  std::string config;
  std::optional<std::string> zones, parcels, workers, jobs, nodes, edges, flows, hourly_costs, output;
  std::optional<std::string> decay, beta;
  std::optional<double> cell_size, distance_floor, snap_tolerance, iso_percentile;
  std::optional<unsigned> threads;
  bool directed = false;
  bool hourly_from_edges = false;
};

void add_config_options(CLI::App* cmd, Overrides& o)
{
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--zones", o.zones, "zone polygons (GeoJSON)");
  cmd->add_option("--parcels", o.parcels, "land-use parcels (GeoJSON)");
  cmd->add_option("--workers", o.workers, "worker interval counts (CSV)");
  cmd->add_option("--jobs", o.jobs, "job interval counts (CSV)");
  cmd->add_option("--nodes", o.nodes, "road nodes (CSV id,x,y)");
  cmd->add_option("--edges", o.edges, "road edges (CSV from,to,length_m[,t00..t23])");
  cmd->add_option("--flows", o.flows, "observed commuting flows (CSV)");
  cmd->add_option("--hourly-costs", o.hourly_costs, "per-hour cost matrices, pattern with {hh}");
  cmd->add_flag("--hourly-from-edges", o.hourly_from_edges, "derive per-hour matrices from edge times");
  cmd->add_flag("--directed", o.directed, "treat edges as one-way");
  cmd->add_option("--cell-size", o.cell_size, "grid cell size in meters");
  cmd->add_option("--decay", o.decay, "power | exponential | gaussian");
  cmd->add_option("--beta", o.beta, "friction coefficient, or 'calibrate'");
  cmd->add_option("--distance-floor", o.distance_floor, "minimum impedance in the decay function");
  cmd->add_option("--snap-tolerance", o.snap_tolerance, "max centroid-to-node distance (0 = 2 cells)");
  cmd->add_option("--iso-percentile", o.iso_percentile, "isosurface threshold percentile");
  cmd->add_option("-j,--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("-o,--output", o.output, "output directory");
}

stacc::RunConfig make_config(const Overrides& o)
{
  stacc::RunConfig c = o.config.empty() ? stacc::RunConfig{} : stacc::load_config(o.config);
  auto path = [](const std::optional<std::string>& v, std::filesystem::path& dst) {
    if (v) dst = std::filesystem::absolute(*v);
  };
  path(o.zones, c.zones);
  path(o.parcels, c.parcels);
  path(o.workers, c.workers);
  path(o.jobs, c.jobs);
  path(o.nodes, c.nodes);
  path(o.edges, c.edges);
  path(o.flows, c.flows);
  path(o.output, c.output);
  if (o.hourly_costs) c.hourly_costs = std::filesystem::absolute(*o.hourly_costs).string();
  if (o.hourly_from_edges) c.hourly_from_edges = true;
  if (o.directed) c.directed = true;
  if (o.cell_size) c.cell_size = *o.cell_size;
  if (o.decay) c.decay = stacc::parse_decay_family(*o.decay);
  if (o.beta) {
    if (*o.beta == "calibrate") {
      c.beta.reset();
    } else {
      c.beta = std::stod(*o.beta);
    }
  }
  if (o.distance_floor) c.distance_floor = *o.distance_floor;
  if (o.snap_tolerance) c.snap_tolerance = *o.snap_tolerance;
  if (o.iso_percentile) c.iso_percentile = *o.iso_percentile;
  if (o.threads) c.threads = *o.threads;
  return c;
}

void print_issues(const stacc::ValidationReport& r)
{
  for (const auto& i : r.issues) {
    std::cerr << (i.severity == stacc::Severity::error ? "error: " : "warning: ") << i.message << '\n';
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Space-time job accessibility: dasymetric grid, hourly G2SFCA, space-time cube"};
  app.require_subcommand(1);
  Overrides o;

  auto* validate = app.add_subcommand("validate", "check inputs and print a validation report");
  auto* run = app.add_subcommand("run", "run every stage and write run_report.json");
  std::vector<CLI::App*> stages;
  for (const char* name : {"temporal", "grid", "dasymetric", "odmatrix", "calibrate", "access", "cube"}) {
    stages.push_back(app.add_subcommand(name, std::string("run only the ") + name + " stage"));
  }
  for (CLI::App* cmd : stages) add_config_options(cmd, o);
  add_config_options(validate, o);
  add_config_options(run, o);

  auto* serve = app.add_subcommand("serve", "serve an output directory over HTTP");
  std::string dir = "out", host = "127.0.0.1";
  int port = 8080;
  serve->add_option("dir", dir, "directory to serve")->check(CLI::ExistingDirectory);
  serve->add_option("--host", host, "bind address");
  serve->add_option("-p,--port", port, "port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      std::cerr << "serving " << dir << " on http://" << host << ":" << port << "/\n";
      stacc::serve(dir, host, port);
      return kOk;
    }

    stacc::RunConfig config;
    try {
      config = make_config(o);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalid;
    }

    if (validate->parsed()) {
      const stacc::ValidationReport r = stacc::validate(config);
      std::cout << r.to_json() << '\n';
      return r.ok() ? kOk : kInvalid;
    }

    if (run->parsed()) {
      try {
        stacc::run_pipeline(config, &std::cerr);
      } catch (const stacc::ValidationFailed& e) {
        print_issues(e.report());
        return kInvalid;
      }
      std::cerr << "report: " << (config.output / stacc::artifact::report).string() << '\n';
      return kOk;
    }

    for (CLI::App* cmd : stages) {
      if (!cmd->parsed()) continue;
      std::filesystem::create_directories(config.output);
      stacc::run_stage(cmd->get_name(), config);
      if (cmd->get_name() == "cube") stacc::assemble_report(config);
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
