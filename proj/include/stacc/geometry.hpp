// Planar geometry for the accessibility engine: uniform grids, polygons,
// clipping and a bounding-box index. Coordinates are projected meters.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool intersects(const Box& o) const
  {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
};

using Ring = std::vector<Point>;

/// Exterior ring plus holes. Rings are closed (first vertex == last) and
/// must not self-intersect; orientation is normalized on use.
struct Polygon {
  Ring exterior;
  std::vector<Ring> holes;
};

using MultiPolygon = std::vector<Polygon>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear cell id, row-major: id = row * nx + col.
using CellId = std::int64_t;

struct CellIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform square tessellation. Cell (col,row) covers the half-open box
/// [origin_x + col*size, origin_x + (col+1)*size) x [origin_y + row*size, ...).
class Grid {
 public:
  Grid(double origin_x, double origin_y, double cell_size, int nx, int ny);

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_size() const { return cell_size_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(nx_) * ny_; }

  bool contains(CellIndex c) const { return c.col >= 0 && c.col < nx_ && c.row >= 0 && c.row < ny_; }
  CellId id(CellIndex c) const;
  CellIndex index(CellId id) const;

  Box cell_box(CellIndex c) const;
  Box extent() const;

  /// Inclusive range of cells whose boxes touch `b`, clamped to the grid.
  /// Returns false when `b` lies entirely outside.
  bool cell_range(const Box& b, CellIndex& lo, CellIndex& hi) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double origin_x_;
  double origin_y_;
  double cell_size_;
  int nx_;
  int ny_;
};

/// Covers `extent` with square cells; the origin is snapped down to an
/// integer multiple of `cell_size`.
Grid tessellate_grid(const Box& extent, double cell_size);

/// Geometric center of a cell. Throws std::out_of_range for a bad index.
Point cell_centroid(const Grid& grid, CellIndex cell);

Polygon box_polygon(const Box& b);
Box bounds(const Polygon& p);
Box bounds(const MultiPolygon& mp);

/// Throws GeometryError for open rings, too few vertices, non-finite
/// coordinates or self-intersections.
void validate_polygon(const Polygon& p);

double area(const Polygon& p);
double area(const MultiPolygon& mp);
Point centroid(const MultiPolygon& mp);

/// Pieces of a∩b. Slivers below kSliverArea are dropped.
MultiPolygon intersection(const MultiPolygon& a, const MultiPolygon& b);
MultiPolygon intersection(const MultiPolygon& a, const Box& b);

double intersection_area(const Polygon& a, const Polygon& b);
double intersection_area(const MultiPolygon& a, const Box& b);

inline constexpr double kSliverArea = 1e-9;

/// Static R-tree over polygon bounding boxes.
class PolygonIndex {
 public:
  explicit PolygonIndex(const std::vector<MultiPolygon>& polygons);
  PolygonIndex(PolygonIndex&&) noexcept;
  PolygonIndex& operator=(PolygonIndex&&) noexcept;
  ~PolygonIndex();

  /// Ids (positions in the construction vector) whose boxes intersect the
  /// probe's box, ascending.
  std::vector<std::size_t> query(const Box& probe) const;
  std::vector<std::size_t> query(const Polygon& probe) const { return query(bounds(probe)); }

  std::size_t size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_ = 0;
};

}  // namespace stacc
