#include <doctest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "stacc/network.hpp"

using namespace stacc;

namespace {

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / "stacc_network_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
  std::ofstream(p) << text;
}

struct RandomGraph {
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
};

/// Integer edge lengths keep every path sum exact, so distances can be
/// compared with ==. Lengths are at least the Euclidean span of the edge.
RandomGraph random_graph(std::mt19937_64& rng, int n, int m)
{
  RandomGraph g;
  std::uniform_real_distribution<double> pos(0, 1000);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> extra(0, 300);
  for (int i = 0; i < n; ++i) g.nodes.push_back({100 + 7 * i, pos(rng), pos(rng)});
  for (int k = 0; k < m; ++k) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double dx = g.nodes[a].x - g.nodes[b].x, dy = g.nodes[a].y - g.nodes[b].y;
    const double len = std::ceil(std::sqrt(dx * dx + dy * dy)) + extra(rng);
    g.edges.push_back({g.nodes[a].id, g.nodes[b].id, len, {}});
  }
  return g;
}

}  // namespace

TEST_CASE("load_network validates and reports components")
{
  const auto nodes = scratch("nodes.csv");
  const auto edges = scratch("edges.csv");
  write_text(nodes, "id,x,y\n1,0,0\n2,100,0\n");
  write_text(edges, "from,to,length_m\n1,2,100\n");
  std::vector<std::string> warnings;
  const RoadGraph g = load_network(nodes, edges, false, &warnings);
  CHECK(g.node_count() == 2);
  CHECK(g.component_sizes() == std::vector<std::size_t>{2});
  CHECK(warnings.empty());

  write_text(edges, "from,to,length_m\n1,2,100\n2,7,50\n");
  CHECK_THROWS_WITH(load_network(nodes, edges, false), doctest::Contains("edge #1"));

  write_text(edges, "from,to,length_m\n1,2,0\n");
  CHECK_THROWS_WITH(load_network(nodes, edges, false), doctest::Contains("non-positive length"));

  write_text(nodes, "id,x,y\n1,0,0\n2,100,0\n3,500,500\n4,600,500\n5,700,500\n");
  write_text(edges, "from,to,length_m\n1,2,100\n3,4,100\n4,5,100\n");
  warnings.clear();
  const RoadGraph split = load_network(nodes, edges, false, &warnings);
  CHECK(split.component_sizes() == std::vector<std::size_t>{3, 2});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("sizes 3 2") != std::string::npos);
}

TEST_CASE("edge files with hourly times")
{
  const auto nodes = scratch("hnodes.csv");
  const auto edges = scratch("hedges.csv");
  write_text(nodes, "id,x,y\n1,0,0\n2,100,0\n");
  std::string header = "from,to,length_m";
  std::string row = "1,2,100";
  for (int h = 0; h < 24; ++h) {
    char name[8];
    std::snprintf(name, sizeof(name), ",t%02d", h);
    header += name;
    row += "," + std::to_string(10 + h);
  }
  write_text(edges, header + "\n" + row + "\n");
  const RoadGraph g = load_network(nodes, edges, true);
  CHECK(g.has_hourly_times());
  CHECK(shortest_path_tree(g, 1, EdgeWeight::at_hour(7))[1] == 17.0);
  CHECK(is_unreachable(shortest_path_tree(g, 2, EdgeWeight::at_hour(7))[0]));

  write_text(edges, "from,to,length_m\n1,2,100\n");
  const RoadGraph plain = load_network(nodes, edges, true);
  CHECK_THROWS_AS(shortest_path_tree(plain, 1, EdgeWeight::at_hour(7)), std::invalid_argument);
}

TEST_CASE("snap_to_node")
{
  const RoadGraph g({{9, 10, 0}, {3, 0, 0}, {4, 5, 100}}, {}, false);
  CHECK(snap_to_node(g, {5, 100}, 1) == 4);
  CHECK(snap_to_node(g, {5, 0}, 10) == 3);
  CHECK_THROWS_AS(snap_to_node(g, {505, 0}, 100), SnapError);
  CHECK_THROWS_AS(snap_to_node(g, {0, 0}, 0), std::invalid_argument);
}

TEST_CASE("shortest_path_tree basics")
{
  const RoadGraph g({{1, 0, 0}, {2, 1, 0}, {3, 3, 0}}, {{1, 2, 1, {}}, {2, 3, 2, {}}}, false);
  const auto d = shortest_path_tree(g, 1, EdgeWeight::length());
  CHECK(d[g.index_of(1)] == 0.0);
  CHECK(d[g.index_of(3)] == 3.0);
  CHECK_THROWS_AS(shortest_path_tree(g, 42, EdgeWeight::length()), std::out_of_range);
}

TEST_CASE("shortest_path_tree matches Floyd-Warshall on random graphs")
{
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const bool directed = trial % 2 == 1;
    const RandomGraph rg = random_graph(rng, 50, 120);
    const RoadGraph g(rg.nodes, rg.edges, directed);
    const auto fw = oracle::floyd_warshall(rg.nodes.size(), rg.edges, rg.nodes, directed);
    for (std::size_t s = 0; s < rg.nodes.size(); ++s) {
      const auto d = shortest_path_tree(g, rg.nodes[s].id, EdgeWeight::length());
      for (std::size_t v = 0; v < rg.nodes.size(); ++v) {
        const double got = d[g.index_of(rg.nodes[v].id)];
        if (std::isinf(fw[s][v])) {
          CHECK(is_unreachable(got));
        } else {
          CHECK(got == fw[s][v]);
        }
      }
    }
  }
}

TEST_CASE("od_matrix examples")
{
  const Grid grid(0, 0, 500, 2, 1);
  const RoadGraph g({{1, 250, 250}, {2, 750, 250}}, {{1, 2, 100, {}}}, false);
  const CostMatrix m = od_matrix(g, {grid.id({0, 0})}, {grid.id({1, 0})}, grid, {});
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 1);
  CHECK(m.at(0, 0) == 100.0);
  CHECK(m.unit == "m");

  const CostMatrix self = od_matrix(g, {0, 1}, {0, 1}, grid, {});
  CHECK(self.at(0, 0) == 250.0);
  CHECK(self.at(1, 1) == 250.0);
  CHECK(self.at(0, 1) == 100.0);

  const RoadGraph islands({{1, 250, 250}, {2, 750, 250}}, {}, false);
  CHECK(is_unreachable(od_matrix(islands, {0}, {1}, grid, {}).at(0, 0)));
}

TEST_CASE("od_matrix lists every cell that fails to snap")
{
  const Grid grid(0, 0, 500, 4, 1);
  const RoadGraph g({{1, 250, 250}}, {}, false);
  OdOptions opts;
  opts.snap_tolerance = 100;
  try {
    od_matrix(g, {0, 2}, {3}, grid, opts);
    FAIL("expected SnapError");
  } catch (const SnapError& e) {
    CHECK(e.cells() == std::vector<CellId>{2, 3});
    CHECK(std::string(e.what()).find("(2,0)") != std::string::npos);
  }
}

TEST_CASE("od_matrix properties on a random street network")
{
  std::mt19937_64 rng(17);
  const Grid grid(0, 0, 100, 10, 10);
  const RandomGraph rg = random_graph(rng, 60, 240);
  const RoadGraph g(rg.nodes, rg.edges, false);
  std::vector<CellId> cells;
  for (CellId c = 0; c < grid.cell_count(); c += 3) cells.push_back(c);
  OdOptions opts;
  opts.snap_tolerance = 2000;
  opts.threads = 1;
  const CostMatrix one = od_matrix(g, cells, cells, grid, opts);
  for (unsigned threads : {2u, 8u}) {
    opts.threads = threads;
    const CostMatrix many = od_matrix(g, cells, cells, grid, opts);
    CHECK(std::memcmp(one.values.data(), many.values.data(), one.values.size() * sizeof(double)) == 0);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double a = one.at(i, j), b = one.at(j, i);
      if (is_unreachable(a)) {
        CHECK(is_unreachable(b));
        continue;
      }
      CHECK(std::abs(a - b) <= 1e-9 * std::max(a, 1.0));
      if (i == j) continue;
      const NodeId ni = snap_to_node(g, cell_centroid(grid, grid.index(cells[i])), 2000);
      const NodeId nj = snap_to_node(g, cell_centroid(grid, grid.index(cells[j])), 2000);
      const NodeRecord& p = g.node(g.index_of(ni));
      const NodeRecord& q = g.node(g.index_of(nj));
      CHECK(a + 1e-9 >= std::hypot(p.x - q.x, p.y - q.y));
    }
  }

  // Triangle inequality over node triples.
  std::uniform_int_distribution<std::size_t> pick(0, rg.nodes.size() - 1);
  for (int k = 0; k < 200; ++k) {
    const NodeId a = rg.nodes[pick(rng)].id, b = rg.nodes[pick(rng)].id;
    const auto da = shortest_path_tree(g, a, EdgeWeight::length());
    const auto db = shortest_path_tree(g, b, EdgeWeight::length());
    const double ab = da[g.index_of(b)];
    if (is_unreachable(ab)) continue;
    for (std::size_t c = 0; c < g.node_count(); ++c) {
      if (is_unreachable(da[c]) || is_unreachable(db[c])) continue;
      CHECK(da[c] <= ab + db[c] + 1e-9);
    }
  }
}

TEST_CASE("cost matrix file round trip and errors")
{
  CostMatrix m;
  m.origins = {3, 5};
  m.destinations = {7, 11, 13};
  m.values = {1.5, kUnreachable, 250, 0.25, 1e6, 42};
  m.hour = 7;
  m.unit = "s";
  const auto path = scratch("m.stm");
  write_cost_matrix(path, m);
  const CostMatrix back = read_cost_matrix(path);
  CHECK(back.origins == m.origins);
  CHECK(back.destinations == m.destinations);
  CHECK(back.unit == "s");
  CHECK(back.hour == 7);
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    if (is_unreachable(m.values[k])) {
      CHECK(is_unreachable(back.values[k]));
    } else {
      CHECK(back.values[k] == static_cast<float>(m.values[k]));
    }
  }

  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
  CHECK_THROWS_WITH(read_cost_matrix(path), doctest::Contains("expected 24"));
}

TEST_CASE("load_time_varying_costs")
{
  CostMatrix m;
  m.origins = {1, 2};
  m.destinations = {3, 4};
  m.values = {10, 20, 30, 40};
  const std::string pattern = scratch("tv_{hh}.stm").string();
  for (int h = 0; h < 24; ++h) write_cost_matrix(hourly_path(pattern, h), m);
  const auto all = load_time_varying_costs(pattern);
  REQUIRE(all.size() == 24);
  for (const auto& x : all) CHECK(x.values == all[0].values);
  CHECK(all[13].hour == 13);

  CostMatrix swapped = m;
  swapped.destinations = {4, 3};
  write_cost_matrix(hourly_path(pattern, 7), swapped);
  CHECK_THROWS_WITH(load_time_varying_costs(pattern), doctest::Contains("hour 7"));
  write_cost_matrix(hourly_path(pattern, 7), m);

  std::filesystem::remove(hourly_path(pattern, 13));
  CHECK_THROWS_WITH(load_time_varying_costs(pattern), doctest::Contains("hour 13"));
}
