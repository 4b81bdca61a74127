// Generates the synthetic "mini-city" fixture: a 10 km square at 500 m
// resolution with 12 count zones, ~40 land-use parcels, a jittered 14x14
// street lattice with hourly travel times, interval-coded worker/job
// tables and zone-to-zone commuting flows. Output is deterministic for a
// given seed.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using json = nlohmann::ordered_json;

constexpr double kX0 = 356000.0;
constexpr double kY0 = 3080000.0;
constexpr double kSize = 10000.0;
constexpr int kZoneCols = 4;
constexpr int kZoneRows = 3;
constexpr int kLattice = 14;

double round_to(double v, double step) { return std::round(v / step) * step; }

struct Zone {
  std::string id;
  double x0, y0, x1, y1;
  double cx() const { return (x0 + x1) / 2; }
  double cy() const { return (y0 + y1) / 2; }
};

json ring_json(const std::vector<std::array<double, 2>>& pts)
{
  json ring = json::array();
  for (const auto& p : pts) ring.push_back({p[0], p[1]});
  ring.push_back({pts.front()[0], pts.front()[1]});
  return ring;
}

json collection(json features)
{
  json fc;
  fc["type"] = "FeatureCollection";
  fc["crs"] = {{"type", "name"}, {"properties", {{"name", "urn:ogc:def:crs:EPSG::32617"}}}};
  fc["features"] = std::move(features);
  return fc;
}

json polygon_feature(json props, const std::vector<std::array<double, 2>>& pts)
{
  json f;
  f["type"] = "Feature";
  f["properties"] = std::move(props);
  f["geometry"] = {{"type", "Polygon"}, {"coordinates", json::array({ring_json(pts)})}};
  return f;
}

void write(const std::filesystem::path& p, const std::string& text)
{
  std::ofstream out(p);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

/// Relative departure (or job start) intensity by hour: a morning peak,
/// an afternoon shoulder and a quiet night.
double profile(int hour, bool jobs)
{
  const double am = std::exp(-0.5 * std::pow((hour - (jobs ? 8.0 : 7.2)) / 1.1, 2));
  const double pm = std::exp(-0.5 * std::pow((hour - 15.5) / 2.0, 2));
  return 0.02 + am + 0.35 * pm;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Write the mini-city fixture"};
  std::string out_dir = "minicity";
  std::uint64_t seed = 20240917;
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Zones: a 4x3 tiling with jittered interior boundaries.
  std::vector<double> xs{kX0}, ys{kY0};
  for (int i = 1; i < kZoneCols; ++i) xs.push_back(round_to(kX0 + kSize * (i + 0.5 * (unit(rng) - 0.5)) / kZoneCols, 10));
  for (int j = 1; j < kZoneRows; ++j) ys.push_back(round_to(kY0 + kSize * (j + 0.5 * (unit(rng) - 0.5)) / kZoneRows, 10));
  xs.push_back(kX0 + kSize);
  ys.push_back(kY0 + kSize);
  std::vector<Zone> zones;
  json zone_features = json::array();
  for (int j = 0; j < kZoneRows; ++j) {
    for (int i = 0; i < kZoneCols; ++i) {
      char id[16];
      std::snprintf(id, sizeof(id), "Z%02d", static_cast<int>(zones.size()) + 1);
      const Zone z{id, xs[i], ys[j], xs[i + 1], ys[j + 1]};
      zones.push_back(z);
      zone_features.push_back(
          polygon_feature({{"id", z.id}}, {{z.x0, z.y0}, {z.x1, z.y0}, {z.x1, z.y1}, {z.x0, z.y1}}));
    }
  }
  write(dir / "zones.geojson", collection(zone_features).dump(1) + "\n");

  // Parcels: rotated rectangles. Three per zone (two residential, one
  // commercial/industrial), a few straddling parcels, and one park.
  json parcel_features = json::array();
  int parcel_no = 0;
  auto add_parcel = [&](double cx, double cy, double w, double h, double angle, const std::string& use) {
    std::vector<std::array<double, 2>> pts;
    const double c = std::cos(angle), s = std::sin(angle);
    for (auto [u, v] : {std::pair{-w, -h}, {w, -h}, {w, h}, {-w, h}}) {
      pts.push_back({round_to(cx + (u * c - v * s) / 2, 0.01), round_to(cy + (u * s + v * c) / 2, 0.01)});
    }
    char id[16];
    std::snprintf(id, sizeof(id), "P%03d", ++parcel_no);
    parcel_features.push_back(polygon_feature({{"id", id}, {"land_use", use}}, pts));
  };
  for (const Zone& z : zones) {
    for (int k = 0; k < 3; ++k) {
      const double w = 250 + 650 * unit(rng), h = 250 + 650 * unit(rng);
      const double cx = z.x0 + 450 + (z.x1 - z.x0 - 900) * unit(rng);
      const double cy = z.y0 + 450 + (z.y1 - z.y0 - 900) * unit(rng);
      const char* use = k < 2 ? "residential" : (unit(rng) < 0.6 ? "commercial" : "industrial");
      add_parcel(cx, cy, w, h, unit(rng) * 1.5, use);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const Zone& z = zones[1 + 4 * k];  // on the boundary to the east neighbour
    add_parcel(z.x1, z.cy(), 700, 400, 0.2 * k, k == 1 ? "residential" : "commercial");
  }
  add_parcel(kX0 + kSize / 2, kY0 + kSize / 2, 600, 600, 0.0, "park");
  write(dir / "parcels.geojson", collection(parcel_features).dump(1) + "\n");

  // Interval-coded counts: one 5-hour night bucket, 15-minute intervals
  // through the morning, hourly afterwards.
  auto count_table = [&](bool jobs) {
    std::ostringstream csv;
    csv << "zone_id,start_minute,end_minute,count\n";
    std::vector<double> totals;
    for (const Zone& z : zones) {
      // Jobs concentrate in the middle of the map, workers around it.
      const double r = std::hypot(z.cx() - (kX0 + kSize / 2), z.cy() - (kY0 + kSize / 2)) / kSize;
      const double daily = std::round((jobs ? 4000 * std::exp(-4 * r) : 1500 * (0.5 + r)) * (0.7 + 0.6 * unit(rng)));
      double weight_sum = 0.0;
      for (int h = 0; h < 24; ++h) weight_sum += profile(h, jobs);
      totals.push_back(0);
      auto emit = [&](int start, int end, double share) {
        const double n = std::round(daily * share * (0.9 + 0.2 * unit(rng)));
        csv << z.id << ',' << start << ',' << end << ',' << n << '\n';
        totals.back() += n;
      };
      double night = 0.0;
      for (int h = 0; h < 5; ++h) night += profile(h, jobs);
      emit(0, 300, night / weight_sum);
      for (int m = 300; m < 600; m += 15) emit(m, m + 15, profile(m / 60, jobs) / weight_sum / 4);
      for (int m = 600; m < 1440; m += 60) emit(m, m + 60, profile(m / 60, jobs) / weight_sum);
    }
    return std::pair{csv.str(), totals};
  };
  const auto [workers_csv, workers] = count_table(false);
  const auto [jobs_csv, jobs] = count_table(true);
  write(dir / "workers.csv", workers_csv);
  write(dir / "jobs.csv", jobs_csv);

  // Street lattice with jittered nodes, a few missing links and some
  // diagonals; travel times slow down in the peaks.
  std::ostringstream nodes_csv, edges_csv;
  nodes_csv << std::setprecision(12) << "id,x,y\n";
  edges_csv << std::setprecision(12) << "from,to,length_m";
  for (int h = 0; h < 24; ++h) edges_csv << ",t" << std::setw(2) << std::setfill('0') << h << std::setfill(' ');
  edges_csv << '\n';
  const double spacing = kSize / (kLattice - 1);
  std::vector<std::array<double, 2>> pos;
  auto node_id = [](int i, int j) { return 1000 + j * kLattice + i; };
  for (int j = 0; j < kLattice; ++j) {
    for (int i = 0; i < kLattice; ++i) {
      const double x = round_to(kX0 + i * spacing + (i > 0 && i < kLattice - 1 ? 160 * (unit(rng) - 0.5) : 0), 0.1);
      const double y = round_to(kY0 + j * spacing + (j > 0 && j < kLattice - 1 ? 160 * (unit(rng) - 0.5) : 0), 0.1);
      pos.push_back({x, y});
      nodes_csv << node_id(i, j) << ',' << x << ',' << y << '\n';
    }
  }
  auto edge = [&](int a, int b, double arterial) {
    const auto& p = pos[a - 1000];
    const auto& q = pos[b - 1000];
    const double len = round_to(std::hypot(p[0] - q[0], p[1] - q[1]) * (1.0 + 0.1 * unit(rng)), 0.1);
    edges_csv << a << ',' << b << ',' << len;
    for (int h = 0; h < 24; ++h) {
      const double congestion = 1.0 + arterial * (std::exp(-0.5 * std::pow((h - 7.5) / 1.0, 2)) +
                                                  0.8 * std::exp(-0.5 * std::pow((h - 17.0) / 1.2, 2)));
      edges_csv << ',' << round_to(len / 13.9 * congestion, 0.01);  // ~50 km/h free flow
    }
    edges_csv << '\n';
  };
  for (int j = 0; j < kLattice; ++j) {
    for (int i = 0; i < kLattice; ++i) {
      const double arterial = (i % 4 == 0 || j % 4 == 0) ? 0.9 : 0.3;
      if (i + 1 < kLattice && unit(rng) > 0.04) edge(node_id(i, j), node_id(i + 1, j), arterial);
      if (j + 1 < kLattice && unit(rng) > 0.04) edge(node_id(i, j), node_id(i, j + 1), arterial);
      if (i + 1 < kLattice && j + 1 < kLattice && unit(rng) < 0.08) edge(node_id(i, j), node_id(i + 1, j + 1), 0.5);
    }
  }
  write(dir / "nodes.csv", nodes_csv.str());
  write(dir / "edges.csv", edges_csv.str());

  // Flows follow a gravity model in straight-line distance with lognormal
  // noise, so the calibrated exponent lands near (not exactly on) 0.8.
  std::normal_distribution<double> noise(0.0, 0.15);
  std::ostringstream flows_csv;
  flows_csv << "origin_id,destination_id,commuters\n";
  for (std::size_t a = 0; a < zones.size(); ++a) {
    for (std::size_t b = 0; b < zones.size(); ++b) {
      const double d = a == b ? 600.0 : std::hypot(zones[a].cx() - zones[b].cx(), zones[a].cy() - zones[b].cy());
      const double c = 0.35 * workers[a] * jobs[b] * std::pow(d, -0.8) / 100.0 * std::exp(noise(rng));
      flows_csv << zones[a].id << ',' << zones[b].id << ',' << std::max(1.0, std::round(c)) << '\n';
    }
  }
  write(dir / "flows.csv", flows_csv.str());

  json config;
  config["zones"] = "zones.geojson";
  config["parcels"] = "parcels.geojson";
  config["workers"] = "workers.csv";
  config["jobs"] = "jobs.csv";
  config["nodes"] = "nodes.csv";
  config["edges"] = "edges.csv";
  config["flows"] = "flows.csv";
  config["cell_size"] = 500;
  config["decay"] = "power";
  config["beta"] = "calibrate";
  config["distance_floor"] = 250;
  config["iso_percentile"] = 95;
  config["output"] = "out";
  write(dir / "config.json", config.dump(2) + "\n");
  std::cerr << "mini-city written to " << dir.string() << '\n';
  return 0;
}
