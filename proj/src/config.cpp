#include "stacc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stacc/dasymetric.hpp"
#include "stacc/geojson.hpp"
#include "stacc/network.hpp"
#include "stacc/temporal.hpp"

namespace stacc {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {"zones",        "parcels",        "workers",        "jobs",
                                     "nodes",        "edges",          "flows",          "hourly_costs",
                                     "hourly_from_edges", "directed",  "cell_size",      "decay",
                                     "beta",         "hourly_beta",    "distance_floor", "snap_tolerance",
                                     "iso_percentile", "threads",      "output"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string join_ids(const std::set<std::string>& ids)
{
  std::string out;
  for (const std::string& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }

  RunConfig c;
  try {
    auto path = [&](const char* key, std::filesystem::path& out) {
      if (j.contains(key)) out = resolve(base_dir, j[key].get<std::string>());
    };
    path("zones", c.zones);
    path("parcels", c.parcels);
    path("workers", c.workers);
    path("jobs", c.jobs);
    path("nodes", c.nodes);
    path("edges", c.edges);
    path("flows", c.flows);
    path("output", c.output);
    if (j.contains("hourly_costs")) c.hourly_costs = resolve(base_dir, j["hourly_costs"].get<std::string>()).string();
    c.hourly_from_edges = j.value("hourly_from_edges", c.hourly_from_edges);
    c.directed = j.value("directed", c.directed);
    c.cell_size = j.value("cell_size", c.cell_size);
    if (j.contains("decay")) c.decay = parse_decay_family(j["decay"].get<std::string>());
    if (j.contains("beta")) {
      const json& b = j["beta"];
      if (b.is_string()) {
        if (b.get<std::string>() != "calibrate") {
          throw std::invalid_argument("beta must be a number or \"calibrate\"");
        }
        c.beta.reset();
      } else {
        c.beta = b.get<double>();
      }
    } else {
      c.beta = 1.0;
    }
    c.hourly_beta = j.value("hourly_beta", c.hourly_beta);
    c.distance_floor = j.value("distance_floor", c.distance_floor);
    c.snap_tolerance = j.value("snap_tolerance", c.snap_tolerance);
    c.iso_percentile = j.value("iso_percentile", c.iso_percentile);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::filesystem::absolute(path).parent_path());
}

std::string to_json(const RunConfig& c)
{
  nlohmann::ordered_json j;
  j["zones"] = c.zones.string();
  j["parcels"] = c.parcels.string();
  j["workers"] = c.workers.string();
  j["jobs"] = c.jobs.string();
  j["nodes"] = c.nodes.string();
  j["edges"] = c.edges.string();
  j["flows"] = c.flows.string();
  j["hourly_costs"] = c.hourly_costs;
  j["hourly_from_edges"] = c.hourly_from_edges;
  j["directed"] = c.directed;
  j["cell_size"] = c.cell_size;
  j["decay"] = to_string(c.decay);
  if (c.beta) {
    j["beta"] = *c.beta;
  } else {
    j["beta"] = "calibrate";
  }
  j["hourly_beta"] = c.hourly_beta;
  j["distance_floor"] = c.distance_floor;
  j["snap_tolerance"] = c.snap_tolerance;
  j["iso_percentile"] = c.iso_percentile;
  j["threads"] = c.threads;
  j["output"] = c.output.string();
  return j.dump(2);
}

std::size_t ValidationReport::error_count() const
{
  return std::count_if(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::error; });
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

std::string ValidationReport::to_json() const
{
  nlohmann::ordered_json j;
  j["errors"] = error_count();
  j["warnings"] = warning_count();
  j["issues"] = nlohmann::ordered_json::array();
  for (const ValidationIssue& i : issues) {
    j["issues"].push_back({{"severity", i.severity == Severity::error ? "error" : "warning"}, {"message", i.message}});
  }
  return j.dump(2);
}

ValidationReport validate(const RunConfig& c)
{
  ValidationReport r;

  if (!(c.cell_size > 0.0)) r.error("cell_size must be positive");
  if (c.beta && !(*c.beta > 0.0)) r.error("beta must be positive (decay is applied as d^-beta)");
  if (!c.hourly_beta.empty()) {
    if (c.hourly_beta.size() != static_cast<std::size_t>(kHours)) r.error("hourly_beta must list 24 values");
    for (double b : c.hourly_beta) {
      if (!(b > 0.0)) {
        r.error("hourly_beta values must be positive");
        break;
      }
    }
  }
  if (!(c.distance_floor >= 0.0)) r.error("distance_floor must be non-negative");
  if (!(c.snap_tolerance >= 0.0)) r.error("snap_tolerance must be non-negative");
  if (!(c.iso_percentile >= 0.0 && c.iso_percentile <= 100.0)) r.error("iso_percentile must lie in [0, 100]");
  if (c.hourly_from_edges && !c.hourly_costs.empty()) {
    r.error("hourly_costs and hourly_from_edges are mutually exclusive");
  }

  auto input = [&](const char* name, const std::filesystem::path& p) {
    if (p.empty()) {
      r.error(std::string(name) + ": no file configured");
      return false;
    }
    if (!std::filesystem::is_regular_file(p)) {
      r.error(std::string(name) + " file not found: " + p.string());
      return false;
    }
    return true;
  };
  const bool have_zones = input("zones", c.zones);
  const bool have_parcels = input("parcels", c.parcels);
  const bool have_workers = input("workers", c.workers);
  const bool have_jobs = input("jobs", c.jobs);
  const bool have_nodes = input("nodes", c.nodes);
  const bool have_edges = input("edges", c.edges);
  bool have_flows = false;
  if (c.calibrate()) {
    if (c.flows.empty()) {
      r.error("beta is \"calibrate\" but no flow file is configured");
    } else {
      have_flows = input("flows", c.flows);
    }
  }
  if (!c.hourly_costs.empty()) {
    if (c.hourly_costs.find("{hh}") == std::string::npos) {
      r.error("hourly_costs pattern must contain {hh}");
    } else {
      std::string missing;
      for (int h = 0; h < kHours; ++h) {
        if (!std::filesystem::is_regular_file(hourly_path(c.hourly_costs, h))) {
          missing += (missing.empty() ? "" : ", ") + std::to_string(h);
        }
      }
      if (!missing.empty()) r.error("hourly cost matrices missing for hours " + missing);
    }
  }

  std::set<std::string> zone_ids;
  if (have_zones) {
    try {
      const FeatureLayer zones = read_feature_layer(c.zones);
      for (const Feature& f : zones.features) {
        if (!zone_ids.insert(f.id).second) r.error("zone id " + f.id + " appears more than once in " + c.zones.string());
      }
      if (zones.features.empty()) r.error("zone layer " + c.zones.string() + " has no features");
      if (zones.crs.empty() && looks_like_degrees(zones)) {
        r.warning("zone coordinates look like longitude/latitude degrees; a projected CRS in meters is expected");
      }
    } catch (const std::exception& e) {
      r.error(e.what());
    }
  }

  if (have_parcels) {
    try {
      const FeatureLayer parcels = read_feature_layer(c.parcels);
      const auto aux = build_auxiliary_zones(parcels);
      const auto residential = std::count_if(aux.begin(), aux.end(),
                                             [](const AuxiliaryZone& a) { return a.land_use == LandUse::residential; });
      const auto employment = static_cast<std::ptrdiff_t>(aux.size()) - residential;
      if (residential == 0) {
        r.warning("parcel layer has no residential polygons; workers will be spread by zone area");
      }
      if (employment == 0) r.warning("parcel layer has no employment polygons; jobs will be spread by zone area");
      if (aux.size() < parcels.features.size()) {
        r.warning(std::to_string(parcels.features.size() - aux.size()) +
                  " parcel(s) have a land use other than residential/employment and are ignored");
      }
    } catch (const std::exception& e) {
      r.error(e.what());
    }
  }

  auto check_counts = [&](const char* what, const std::filesystem::path& p) {
    try {
      const CountTable table = read_count_table(p);
      disaggregate_table(table);
      if (!have_zones) return;
      std::set<std::string> unknown;
      for (const auto& [zone, rows] : table) {
        if (!zone_ids.count(zone)) unknown.insert(zone);
      }
      if (!unknown.empty()) {
        r.error(std::string(what) + " counts reference zone(s) absent from the zone geometry: " + join_ids(unknown));
      }
    } catch (const std::exception& e) {
      r.error(e.what());
    }
  };
  if (have_workers) check_counts("worker", c.workers);
  if (have_jobs) check_counts("job", c.jobs);

  if (have_nodes && have_edges) {
    try {
      std::vector<std::string> warnings;
      const RoadGraph g = load_network(c.nodes, c.edges, c.directed, &warnings);
      for (std::string& w : warnings) r.warning(std::move(w));
      if (c.hourly_from_edges && !g.has_hourly_times()) {
        r.error("hourly_from_edges is set but the edge file has no t00..t23 columns");
      }
    } catch (const std::exception& e) {
      r.error(e.what());
    }
  }

  if (have_flows) {
    try {
      const auto flows = read_flows(c.flows);
      std::set<std::string> unknown;
      for (const FlowRecord& f : flows) {
        if (!zone_ids.count(f.origin)) unknown.insert(f.origin);
        if (!zone_ids.count(f.destination)) unknown.insert(f.destination);
      }
      if (have_zones && !unknown.empty()) {
        r.error("flows reference zone(s) absent from the zone geometry: " + join_ids(unknown));
      }
    } catch (const std::exception& e) {
      r.error(e.what());
    }
  }
  return r;
}

}  // namespace stacc
