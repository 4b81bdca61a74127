#include "stacc/network.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "stacc/csv.hpp"
#include "stacc/parallel.hpp"

namespace stacc {

EdgeWeight EdgeWeight::at_hour(int h)
{
  if (h < 0 || h >= kHours) throw std::out_of_range("hour " + std::to_string(h) + " outside 0..23");
  return EdgeWeight{h};
}

RoadGraph::RoadGraph(std::vector<NodeRecord> nodes, const std::vector<EdgeRecord>& edges, bool directed)
    : nodes_(std::move(nodes)), edge_count_(edges.size()), directed_(directed)
{
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw std::runtime_error("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }

  has_hourly_ = !edges.empty() && std::all_of(edges.begin(), edges.end(),
                                               [](const EdgeRecord& e) { return !e.hourly_seconds.empty(); });

  struct Arc {
    std::size_t from, to, edge;
  };
  std::vector<Arc> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const EdgeRecord& e = edges[k];
    const auto from = index_.find(e.from);
    const auto to = index_.find(e.to);
    if (from == index_.end() || to == index_.end()) {
      throw std::runtime_error("edge #" + std::to_string(k) + " (" + std::to_string(e.from) + " -> " +
                               std::to_string(e.to) + ") references missing node " +
                               std::to_string(from == index_.end() ? e.from : e.to));
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw std::runtime_error("edge #" + std::to_string(k) + " has non-positive length");
    }
    if (!e.hourly_seconds.empty()) {
      if (e.hourly_seconds.size() != static_cast<std::size_t>(kHours)) {
        throw std::runtime_error("edge #" + std::to_string(k) + " must have 24 hourly times");
      }
      for (double s : e.hourly_seconds) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw std::runtime_error("edge #" + std::to_string(k) + " has a non-positive hourly time");
        }
      }
    }
    arcs.push_back({from->second, to->second, k});
    if (!directed) arcs.push_back({to->second, from->second, k});
  }
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.from < b.from; });

  offsets_.assign(nodes_.size() + 1, 0);
  targets_.reserve(arcs.size());
  lengths_.reserve(arcs.size());
  if (has_hourly_) hourly_.reserve(arcs.size() * kHours);
  for (const Arc& a : arcs) {
    ++offsets_[a.from + 1];
    targets_.push_back(a.to);
    lengths_.push_back(edges[a.edge].length);
    if (has_hourly_) {
      hourly_.insert(hourly_.end(), edges[a.edge].hourly_seconds.begin(), edges[a.edge].hourly_seconds.end());
    }
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

std::size_t RoadGraph::index_of(NodeId id) const
{
  const auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return it->second;
}

std::vector<std::size_t> RoadGraph::component_sizes() const
{
  std::vector<std::size_t> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (std::size_t u = 0; u < nodes_.size(); ++u) {
    for (std::size_t a = arc_begin(u); a < arc_end(u); ++a) {
      const std::size_t ru = find(u), rv = find(targets_[a]);
      if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
    }
  }
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t v = 0; v < nodes_.size(); ++v) ++sizes[find(v)];
  std::vector<std::size_t> out;
  for (const auto& [root, n] : sizes) out.push_back(n);
  std::sort(out.rbegin(), out.rend());
  return out;
}

RoadGraph load_network(const std::filesystem::path& node_file, const std::filesystem::path& edge_file,
                       bool directed, std::vector<std::string>* warnings)
{
  const csv::Table nt = csv::read(node_file);
  const auto c_id = nt.column("id");
  const auto c_x = nt.column("x");
  const auto c_y = nt.column("y");
  std::vector<NodeRecord> nodes;
  nodes.reserve(nt.rows.size());
  for (const csv::Row& row : nt.rows) {
    nodes.push_back({nt.integer(row, c_id), nt.number(row, c_x), nt.number(row, c_y)});
  }

  const csv::Table et = csv::read(edge_file);
  const auto c_from = et.column("from");
  const auto c_to = et.column("to");
  const auto c_len = et.column("length_m");
  std::vector<std::size_t> hour_cols;
  if (et.has_column("t00")) {
    for (int h = 0; h < kHours; ++h) {
      char name[8];
      std::snprintf(name, sizeof(name), "t%02d", h);
      hour_cols.push_back(et.column(name));
    }
  }
  std::vector<EdgeRecord> edges;
  edges.reserve(et.rows.size());
  for (const csv::Row& row : et.rows) {
    EdgeRecord e{et.integer(row, c_from), et.integer(row, c_to), et.number(row, c_len), {}};
    for (std::size_t c : hour_cols) e.hourly_seconds.push_back(et.number(row, c));
    edges.push_back(std::move(e));
  }

  RoadGraph graph(std::move(nodes), edges, directed);
  if (warnings) {
    const auto sizes = graph.component_sizes();
    if (sizes.size() > 1) {
      std::ostringstream msg;
      msg << "road network has " << sizes.size() << " disconnected components (sizes";
      for (std::size_t s : sizes) msg << ' ' << s;
      msg << ")";
      warnings->push_back(msg.str());
    }
  }
  return graph;
}

NodeId snap_to_node(const RoadGraph& graph, Point p, double tolerance)
{
  if (!(tolerance > 0.0)) throw std::invalid_argument("snap tolerance must be positive");
  const double limit = tolerance * tolerance;
  std::optional<std::size_t> best;
  double best_d2 = 0.0;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const NodeRecord& n = graph.node(i);
    const double dx = n.x - p.x, dy = n.y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > limit) continue;
    if (!best || d2 < best_d2 || (d2 == best_d2 && n.id < graph.node(*best).id)) {
      best = i;
      best_d2 = d2;
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no road node within " << tolerance << " m of (" << p.x << ", " << p.y << ")";
    throw SnapError(msg.str(), {});
  }
  return graph.node(*best).id;
}

namespace {

void dijkstra(const RoadGraph& graph, std::size_t source, EdgeWeight weight, std::vector<double>& dist)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  dist.assign(graph.node_count(), inf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[source] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[u]) continue;
    for (std::size_t a = graph.arc_begin(u); a < graph.arc_end(u); ++a) {
      const std::size_t v = graph.arc_target(a);
      const double nd = d + graph.arc_weight(a, weight);
      if (nd < dist[v]) {
        dist[v] = nd;
        frontier.emplace(nd, v);
      }
    }
  }
  for (double& v : dist) {
    if (v == inf) v = kUnreachable;
  }
}

void check_weight(const RoadGraph& graph, EdgeWeight weight)
{
  if (!weight.is_length() && !graph.has_hourly_times() && graph.edge_count() > 0) {
    throw std::invalid_argument("hour-" + std::to_string(weight.hour) +
                                " weights requested but edges carry no hourly times");
  }
}

}  // namespace

std::vector<double> shortest_path_tree(const RoadGraph& graph, NodeId origin, EdgeWeight weight)
{
  check_weight(graph, weight);
  std::vector<double> dist;
  dijkstra(graph, graph.index_of(origin), weight, dist);
  return dist;
}

namespace {

/// Fills `m` (already sized) from trees rooted at each distinct origin node.
void fill_rows(const RoadGraph& graph, const std::vector<std::size_t>& origin_nodes,
               const std::vector<std::size_t>& dest_nodes, EdgeWeight weight, unsigned threads, CostMatrix& m)
{
  std::map<std::size_t, std::vector<std::size_t>> rows_by_node;
  for (std::size_t i = 0; i < origin_nodes.size(); ++i) rows_by_node[origin_nodes[i]].push_back(i);
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups(rows_by_node.begin(), rows_by_node.end());

  parallel_for(groups.size(), threads, [&](std::size_t g) {
    thread_local std::vector<double> dist;
    dijkstra(graph, groups[g].first, weight, dist);
    for (std::size_t row : groups[g].second) {
      for (std::size_t j = 0; j < dest_nodes.size(); ++j) m.at(row, j) = dist[dest_nodes[j]];
    }
  });
}

}  // namespace

CostMatrix od_matrix(const RoadGraph& graph, const std::vector<CellId>& origin_cells,
                     const std::vector<CellId>& destination_cells, const Grid& grid, const OdOptions& options)
{
  check_weight(graph, options.weight);
  const double tolerance = options.snap_tolerance > 0.0 ? options.snap_tolerance : 2.0 * grid.cell_size();

  std::map<CellId, std::size_t> snapped;
  std::vector<CellId> failures;
  auto snap = [&](CellId cell) {
    if (snapped.count(cell)) return;
    try {
      snapped[cell] = graph.index_of(snap_to_node(graph, cell_centroid(grid, grid.index(cell)), tolerance));
    } catch (const SnapError&) {
      failures.push_back(cell);
    }
  };
  for (CellId c : origin_cells) snap(c);
  for (CellId c : destination_cells) snap(c);
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    failures.erase(std::unique(failures.begin(), failures.end()), failures.end());
    std::ostringstream msg;
    msg << failures.size() << " cell centroid(s) have no road node within " << tolerance << " m:";
    for (CellId c : failures) {
      const CellIndex idx = grid.index(c);
      msg << " (" << idx.col << "," << idx.row << ")";
    }
    throw SnapError(msg.str(), failures);
  }

  CostMatrix m;
  m.origins = origin_cells;
  m.destinations = destination_cells;
  m.values.assign(origin_cells.size() * destination_cells.size(), kUnreachable);
  m.unit = options.weight.is_length() ? "m" : "s";
  if (!options.weight.is_length()) m.hour = options.weight.hour;

  std::vector<std::size_t> origin_nodes, dest_nodes;
  for (CellId c : origin_cells) origin_nodes.push_back(snapped.at(c));
  for (CellId c : destination_cells) dest_nodes.push_back(snapped.at(c));
  fill_rows(graph, origin_nodes, dest_nodes, options.weight, options.threads, m);

  std::unordered_map<CellId, std::size_t> dest_pos;
  for (std::size_t j = 0; j < destination_cells.size(); ++j) dest_pos.emplace(destination_cells[j], j);
  const double floor_value = 0.5 * grid.cell_size();
  for (std::size_t i = 0; i < origin_cells.size(); ++i) {
    const auto it = dest_pos.find(origin_cells[i]);
    if (it != dest_pos.end()) m.at(i, it->second) = floor_value;
  }
  return m;
}

CostMatrix od_matrix_points(const RoadGraph& graph, const std::vector<Point>& origins,
                            const std::vector<Point>& destinations, double tolerance, EdgeWeight weight,
                            unsigned threads)
{
  check_weight(graph, weight);
  std::vector<std::size_t> origin_nodes, dest_nodes;
  for (const Point& p : origins) origin_nodes.push_back(graph.index_of(snap_to_node(graph, p, tolerance)));
  for (const Point& p : destinations) dest_nodes.push_back(graph.index_of(snap_to_node(graph, p, tolerance)));
  CostMatrix m;
  for (std::size_t i = 0; i < origins.size(); ++i) m.origins.push_back(static_cast<CellId>(i));
  for (std::size_t j = 0; j < destinations.size(); ++j) m.destinations.push_back(static_cast<CellId>(j));
  m.values.assign(origins.size() * destinations.size(), kUnreachable);
  m.unit = weight.is_length() ? "m" : "s";
  if (!weight.is_length()) m.hour = weight.hour;
  fill_rows(graph, origin_nodes, dest_nodes, weight, threads, m);
  return m;
}

void write_cost_matrix(const std::filesystem::path& path, const CostMatrix& m)
{
  nlohmann::ordered_json header;
  header["origin_ids"] = m.origins;
  header["destination_ids"] = m.destinations;
  header["unit"] = m.unit;
  if (m.hour) header["hour"] = *m.hour;
  const std::string text = header.dump();

  std::ofstream out = csv::open_output(path);
  detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  detail::put_f32_array(out, m.values);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CostMatrix read_cost_matrix(const std::filesystem::path& path)
{
  std::ifstream in = csv::open_input(path);
  const std::vector<unsigned char> bytes = detail::slurp(in);
  if (bytes.size() < 4) throw std::runtime_error(path.string() + ": truncated header");
  const std::uint32_t len = detail::get_u32(bytes.data());
  if (bytes.size() < 4ull + len) throw std::runtime_error(path.string() + ": truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 4, bytes.begin() + 4 + len);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  CostMatrix m;
  m.origins = header.at("origin_ids").get<std::vector<CellId>>();
  m.destinations = header.at("destination_ids").get<std::vector<CellId>>();
  m.unit = header.value("unit", "m");
  if (header.contains("hour") && !header["hour"].is_null()) m.hour = header["hour"].get<int>();

  const std::size_t count = m.origins.size() * m.destinations.size();
  const std::size_t expected = 4ull + len + 4 * count;
  if (bytes.size() != expected) {
    throw std::runtime_error(path.string() + ": payload is " + std::to_string(bytes.size() - 4 - len) +
                             " bytes, expected " + std::to_string(4 * count));
  }
  m.values = detail::get_f32_array(bytes.data() + 4 + len, count);
  return m;
}

std::filesystem::path hourly_path(const std::string& pattern, int hour)
{
  const auto pos = pattern.find("{hh}");
  if (pos == std::string::npos) throw std::invalid_argument("cost matrix pattern '" + pattern + "' lacks {hh}");
  char hh[4];
  std::snprintf(hh, sizeof(hh), "%02d", hour);
  std::string out = pattern;
  out.replace(pos, 4, hh);
  return out;
}

std::vector<CostMatrix> load_time_varying_costs(const std::string& pattern)
{
  std::vector<CostMatrix> out;
  out.reserve(kHours);
  for (int h = 0; h < kHours; ++h) {
    const auto path = hourly_path(pattern, h);
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error("cost matrix for hour " + std::to_string(h) + " missing: " + path.string());
    }
    CostMatrix m = read_cost_matrix(path);
    if (h > 0) {
      if (m.origins.size() != out[0].origins.size() || m.destinations.size() != out[0].destinations.size()) {
        throw std::runtime_error("cost matrix for hour " + std::to_string(h) + " has shape " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                                 std::to_string(out[0].rows()) + "x" + std::to_string(out[0].cols()));
      }
      if (m.origins != out[0].origins || m.destinations != out[0].destinations) {
        throw std::runtime_error("cost matrix for hour " + std::to_string(h) +
                                 " lists origin/destination ids in a different order than hour 0");
      }
    }
    m.hour = h;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace stacc
