// Road graph, centroid snapping and many-to-many network distances.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stacc/geometry.hpp"
#include "stacc/temporal.hpp"

namespace stacc {

using NodeId = std::int64_t;

/// Marks an unreachable origin/destination pair.
inline constexpr double kUnreachable = std::numeric_limits<double>::quiet_NaN();
inline bool is_unreachable(double d) { return std::isnan(d); }

/// Which edge attribute a search minimizes: metric length, or the
/// traversal time for one departure hour.
struct EdgeWeight {
  int hour = -1;

  static EdgeWeight length() { return {}; }
  static EdgeWeight at_hour(int h);
  bool is_length() const { return hour < 0; }
};

struct NodeRecord {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct EdgeRecord {
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;
  std::vector<double> hourly_seconds;  // empty, or 24 entries
};

class RoadGraph {
 public:
  /// Validates endpoints, positive lengths and hourly vectors. Undirected
  /// graphs store each edge in both directions.
  RoadGraph(std::vector<NodeRecord> nodes, const std::vector<EdgeRecord>& edges, bool directed);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool directed() const { return directed_; }
  bool has_hourly_times() const { return has_hourly_; }

  const NodeRecord& node(std::size_t index) const { return nodes_[index]; }
  /// Throws std::out_of_range for unknown ids.
  std::size_t index_of(NodeId id) const;

  /// Weakly connected component sizes, largest first.
  std::vector<std::size_t> component_sizes() const;

  // Forward-star adjacency.
  std::size_t arc_begin(std::size_t node) const { return offsets_[node]; }
  std::size_t arc_end(std::size_t node) const { return offsets_[node + 1]; }
  std::size_t arc_target(std::size_t arc) const { return targets_[arc]; }
  double arc_weight(std::size_t arc, EdgeWeight w) const
  {
    return w.is_length() ? lengths_[arc] : hourly_[arc * kHours + w.hour];
  }

 private:
  std::vector<NodeRecord> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
  std::vector<double> lengths_;
  std::vector<double> hourly_;
  std::size_t edge_count_ = 0;
  bool directed_ = false;
  bool has_hourly_ = false;
};

/// Node file `id,x,y`; edge file `from,to,length_m[,t00..t23]`.
/// Disconnected components are reported through `warnings`.
RoadGraph load_network(const std::filesystem::path& node_file, const std::filesystem::path& edge_file,
                       bool directed, std::vector<std::string>* warnings = nullptr);

class SnapError : public std::runtime_error {
 public:
  SnapError(const std::string& msg, std::vector<CellId> cells)
      : std::runtime_error(msg), cells_(std::move(cells))
  {
  }
  const std::vector<CellId>& cells() const { return cells_; }

 private:
  std::vector<CellId> cells_;
};

/// Nearest node within `tolerance` (Euclidean); ties go to the smallest
/// node id. Throws SnapError when nothing is in range.
NodeId snap_to_node(const RoadGraph& graph, Point p, double tolerance);

/// Exact single-source distances indexed by node position. Unreachable
/// nodes hold kUnreachable.
std::vector<double> shortest_path_tree(const RoadGraph& graph, NodeId origin, EdgeWeight weight);

/// Dense origins x destinations table. Unreachable pairs hold kUnreachable.
struct CostMatrix {
  std::vector<CellId> origins;
  std::vector<CellId> destinations;
  std::vector<double> values;  // row-major
  std::string unit = "m";
  std::optional<int> hour;

  std::size_t rows() const { return origins.size(); }
  std::size_t cols() const { return destinations.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * destinations.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * destinations.size() + j]; }
};

struct OdOptions {
  double snap_tolerance = 0.0;  // 0 means 2 * cell_size
  EdgeWeight weight;
  unsigned threads = 0;
};

/// One shortest-path tree per distinct snapped origin node. Entries where
/// origin cell == destination cell are set to cell_size / 2.
CostMatrix od_matrix(const RoadGraph& graph, const std::vector<CellId>& origin_cells,
                     const std::vector<CellId>& destination_cells, const Grid& grid, const OdOptions& options);

/// General point-to-point variant used for zone centroids; ids are caller
/// supplied and no intrazonal floor is applied.
CostMatrix od_matrix_points(const RoadGraph& graph, const std::vector<Point>& origins,
                            const std::vector<Point>& destinations, double tolerance, EdgeWeight weight,
                            unsigned threads = 0);

/// Binary layout: uint32 little-endian header length, UTF-8 JSON header
/// {origin_ids, destination_ids, unit, hour?}, then rows*cols float32
/// little-endian values, row-major, NaN = unreachable.
void write_cost_matrix(const std::filesystem::path& path, const CostMatrix& m);
CostMatrix read_cost_matrix(const std::filesystem::path& path);

/// Expands `{hh}` in `pattern` to the zero-padded hour.
std::filesystem::path hourly_path(const std::string& pattern, int hour);

/// Reads 24 matrices and checks that they share origin/destination ids in
/// the same order.
std::vector<CostMatrix> load_time_varying_costs(const std::string& pattern);

}  // namespace stacc
