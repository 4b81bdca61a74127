#include "stacc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace stacc {

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;
using BMulti = bg::model::multi_polygon<BPolygon>;
using BBox = bg::model::box<BPoint>;

void copy_ring(const Ring& in, BPolygon::ring_type& out)
{
  out.clear();
  out.reserve(in.size());
  for (const Point& p : in) out.emplace_back(p.x, p.y);
}

BPolygon to_boost(const Polygon& p)
{
  BPolygon out;
  copy_ring(p.exterior, out.outer());
  out.inners().resize(p.holes.size());
  for (std::size_t i = 0; i < p.holes.size(); ++i) copy_ring(p.holes[i], out.inners()[i]);
  bg::correct(out);
  return out;
}

BMulti to_boost(const MultiPolygon& mp)
{
  BMulti out;
  out.reserve(mp.size());
  for (const Polygon& p : mp) out.push_back(to_boost(p));
  return out;
}

Ring from_boost(const BPolygon::ring_type& r)
{
  Ring out;
  out.reserve(r.size());
  for (const BPoint& p : r) out.push_back({p.x(), p.y()});
  return out;
}

MultiPolygon from_boost(const BMulti& mp)
{
  MultiPolygon out;
  for (const BPolygon& p : mp) {
    if (std::abs(bg::area(p)) < kSliverArea) continue;
    Polygon poly;
    poly.exterior = from_boost(p.outer());
    for (const auto& h : p.inners()) poly.holes.push_back(from_boost(h));
    out.push_back(std::move(poly));
  }
  return out;
}

BBox to_boost(const Box& b) { return BBox(BPoint(b.min_x, b.min_y), BPoint(b.max_x, b.max_y)); }

void check_ring(const Ring& r, const char* what)
{
  if (r.size() < 4) {
    throw GeometryError(std::string(what) + " ring has fewer than 4 vertices");
  }
  for (const Point& p : r) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw GeometryError(std::string(what) + " ring has a non-finite coordinate");
    }
  }
  if (r.front().x != r.back().x || r.front().y != r.back().y) {
    throw GeometryError(std::string(what) + " ring is not closed");
  }
}

}  // namespace

Grid::Grid(double origin_x, double origin_y, double cell_size, int nx, int ny)
    : origin_x_(origin_x), origin_y_(origin_y), cell_size_(cell_size), nx_(nx), ny_(ny)
{
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("grid cell_size must be positive");
  }
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("grid must have nx, ny > 0");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

CellId Grid::id(CellIndex c) const
{
  if (!contains(c)) {
    std::ostringstream msg;
    msg << "cell (" << c.col << "," << c.row << ") outside " << nx_ << "x" << ny_ << " grid";
    throw std::out_of_range(msg.str());
  }
  return static_cast<CellId>(c.row) * nx_ + c.col;
}

CellIndex Grid::index(CellId id) const
{
  if (id < 0 || id >= cell_count()) {
    throw std::out_of_range("cell id " + std::to_string(id) + " outside grid");
  }
  return {static_cast<int>(id % nx_), static_cast<int>(id / nx_)};
}

Box Grid::cell_box(CellIndex c) const
{
  const double x0 = origin_x_ + c.col * cell_size_;
  const double y0 = origin_y_ + c.row * cell_size_;
  return {x0, y0, x0 + cell_size_, y0 + cell_size_};
}

Box Grid::extent() const
{
  return {origin_x_, origin_y_, origin_x_ + nx_ * cell_size_, origin_y_ + ny_ * cell_size_};
}

bool Grid::cell_range(const Box& b, CellIndex& lo, CellIndex& hi) const
{
  if (!b.intersects(extent())) return false;
  auto clamp_col = [&](double x) {
    return std::clamp(static_cast<int>(std::floor((x - origin_x_) / cell_size_)), 0, nx_ - 1);
  };
  auto clamp_row = [&](double y) {
    return std::clamp(static_cast<int>(std::floor((y - origin_y_) / cell_size_)), 0, ny_ - 1);
  };
  lo = {clamp_col(b.min_x), clamp_row(b.min_y)};
  hi = {clamp_col(b.max_x), clamp_row(b.max_y)};
  return true;
}

Grid tessellate_grid(const Box& extent, double cell_size)
{
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("cell_size must be positive");
  }
  if (!(extent.max_x > extent.min_x) || !(extent.max_y > extent.min_y)) {
    throw std::invalid_argument("extent is inverted or degenerate");
  }
  const double ox = std::floor(extent.min_x / cell_size) * cell_size;
  const double oy = std::floor(extent.min_y / cell_size) * cell_size;
  const int nx = std::max(1, static_cast<int>(std::ceil((extent.max_x - ox) / cell_size)));
  const int ny = std::max(1, static_cast<int>(std::ceil((extent.max_y - oy) / cell_size)));
  return Grid(ox, oy, cell_size, nx, ny);
}

Point cell_centroid(const Grid& grid, CellIndex cell)
{
  if (!grid.contains(cell)) {
    std::ostringstream msg;
    msg << "cell (" << cell.col << "," << cell.row << ") outside " << grid.nx() << "x" << grid.ny()
        << " grid";
    throw std::out_of_range(msg.str());
  }
  const Box b = grid.cell_box(cell);
  return {0.5 * (b.min_x + b.max_x), 0.5 * (b.min_y + b.max_y)};
}

Polygon box_polygon(const Box& b)
{
  return Polygon{{{b.min_x, b.min_y},
                  {b.min_x, b.max_y},
                  {b.max_x, b.max_y},
                  {b.max_x, b.min_y},
                  {b.min_x, b.min_y}},
                 {}};
}

Box bounds(const Polygon& p)
{
  if (p.exterior.empty()) return {};
  Box b{p.exterior[0].x, p.exterior[0].y, p.exterior[0].x, p.exterior[0].y};
  for (const Point& q : p.exterior) {
    b.min_x = std::min(b.min_x, q.x);
    b.min_y = std::min(b.min_y, q.y);
    b.max_x = std::max(b.max_x, q.x);
    b.max_y = std::max(b.max_y, q.y);
  }
  return b;
}

Box bounds(const MultiPolygon& mp)
{
  if (mp.empty()) return {};
  Box b = bounds(mp.front());
  for (const Polygon& p : mp) {
    const Box q = bounds(p);
    b.min_x = std::min(b.min_x, q.min_x);
    b.min_y = std::min(b.min_y, q.min_y);
    b.max_x = std::max(b.max_x, q.max_x);
    b.max_y = std::max(b.max_y, q.max_y);
  }
  return b;
}

void validate_polygon(const Polygon& p)
{
  check_ring(p.exterior, "exterior");
  for (const Ring& h : p.holes) check_ring(h, "hole");
  const BPolygon b = to_boost(p);
  std::string reason;
  if (!bg::is_valid(b, reason)) throw GeometryError("invalid polygon: " + reason);
}

double area(const Polygon& p) { return std::abs(bg::area(to_boost(p))); }

double area(const MultiPolygon& mp)
{
  double total = 0.0;
  for (const Polygon& p : mp) total += area(p);
  return total;
}

Point centroid(const MultiPolygon& mp)
{
  BPoint c(0.0, 0.0);
  bg::centroid(to_boost(mp), c);
  return {c.x(), c.y()};
}

MultiPolygon intersection(const MultiPolygon& a, const MultiPolygon& b)
{
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

MultiPolygon intersection(const MultiPolygon& a, const Box& b)
{
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

double intersection_area(const Polygon& a, const Polygon& b)
{
  validate_polygon(a);
  validate_polygon(b);
  if (!bounds(a).intersects(bounds(b))) return 0.0;
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  double total = 0.0;
  for (const BPolygon& p : out) {
    const double piece = std::abs(bg::area(p));
    if (piece >= kSliverArea) total += piece;
  }
  return total;
}

double intersection_area(const MultiPolygon& a, const Box& b)
{
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  double total = 0.0;
  for (const BPolygon& p : out) {
    const double piece = std::abs(bg::area(p));
    if (piece >= kSliverArea) total += piece;
  }
  return total;
}

struct PolygonIndex::Impl {
  using Entry = std::pair<BBox, std::size_t>;
  bgi::rtree<Entry, bgi::rstar<16>> tree;
};

PolygonIndex::PolygonIndex(const std::vector<MultiPolygon>& polygons)
    : impl_(std::make_unique<Impl>()), size_(polygons.size())
{
  std::vector<Impl::Entry> entries;
  entries.reserve(polygons.size());
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    if (polygons[i].empty()) continue;
    entries.emplace_back(to_boost(bounds(polygons[i])), i);
  }
  impl_->tree = decltype(impl_->tree)(entries.begin(), entries.end());
}

PolygonIndex::PolygonIndex(PolygonIndex&&) noexcept = default;
PolygonIndex& PolygonIndex::operator=(PolygonIndex&&) noexcept = default;
PolygonIndex::~PolygonIndex() = default;

std::vector<std::size_t> PolygonIndex::query(const Box& probe) const
{
  std::vector<Impl::Entry> hits;
  impl_->tree.query(bgi::intersects(to_boost(probe)), std::back_inserter(hits));
  std::vector<std::size_t> ids;
  ids.reserve(hits.size());
  for (const auto& h : hits) ids.push_back(h.second);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace stacc
