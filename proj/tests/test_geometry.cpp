#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stacc/geometry.hpp"

using namespace stacc;

namespace {

Polygon square(double x, double y, double size = 1.0) { return box_polygon({x, y, x + size, y + size}); }

}  // namespace

TEST_CASE("tessellate_grid tiles and snaps the extent")
{
  const Grid exact = tessellate_grid({0, 0, 1000, 500}, 500);
  CHECK(exact.nx() == 2);
  CHECK(exact.ny() == 1);
  CHECK(exact.origin_x() == 0.0);
  CHECK(exact.origin_y() == 0.0);

  const Grid snapped = tessellate_grid({10, 10, 990, 490}, 500);
  CHECK(snapped.nx() == 2);
  CHECK(snapped.ny() == 1);
  CHECK(snapped.origin_x() == 0.0);
  CHECK(snapped.origin_y() == 0.0);

  const Grid negative = tessellate_grid({-740, -10, 260, 20}, 500);
  CHECK(negative.origin_x() == -1000.0);
  CHECK(negative.origin_y() == -500.0);
  CHECK(negative.nx() == 3);
  CHECK(negative.ny() == 2);

  CHECK_THROWS_AS(tessellate_grid({0, 0, 100, 100}, 0), std::invalid_argument);
  CHECK_THROWS_AS(tessellate_grid({0, 0, 100, 100}, -5), std::invalid_argument);
  CHECK_THROWS_AS(tessellate_grid({100, 0, 0, 100}, 10), std::invalid_argument);
}

TEST_CASE("cell_centroid")
{
  const Grid g(0, 0, 500, 2, 1);
  CHECK(cell_centroid(g, {0, 0}).x == 250.0);
  CHECK(cell_centroid(g, {0, 0}).y == 250.0);
  CHECK(cell_centroid(g, {1, 0}).x == 750.0);
  CHECK(cell_centroid(g, {1, 0}).y == 250.0);
  CHECK_THROWS_AS(cell_centroid(g, {5, 0}), std::out_of_range);
  CHECK_THROWS_AS(cell_centroid(g, {0, -1}), std::out_of_range);
}

TEST_CASE("grid ids round-trip and cells are half-open")
{
  const Grid g(100, 200, 50, 4, 3);
  for (CellId id = 0; id < g.cell_count(); ++id) CHECK(g.id(g.index(id)) == id);
  CellIndex lo, hi;
  REQUIRE(g.cell_range({149, 249, 151, 251}, lo, hi));
  CHECK(lo == CellIndex{0, 0});
  CHECK(hi == CellIndex{1, 1});
  CHECK_FALSE(g.cell_range({0, 0, 10, 10}, lo, hi));
}

TEST_CASE("intersection_area examples")
{
  CHECK(intersection_area(square(0, 0), square(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(intersection_area(square(0, 0), square(5, 5)) == 0.0);
  CHECK(intersection_area(square(0, 0), square(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-12));

  Polygon holed = square(0, 0, 4);
  holed.holes.push_back({{1, 1}, {3, 1}, {3, 3}, {1, 3}, {1, 1}});
  CHECK(intersection_area(holed, square(0, 0, 4)) == doctest::Approx(12.0));
}

TEST_CASE("intersection_area rejects invalid rings")
{
  const Polygon bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}, {}};
  CHECK_THROWS_AS(intersection_area(bowtie, square(0, 0)), GeometryError);
  const Polygon open{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};
  CHECK_THROWS_AS(validate_polygon(open), GeometryError);
}

TEST_CASE("intersection_area is commutative and bounded on random polygons")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon a = oracle::random_star_polygon(rng, {pos(rng), pos(rng)}, 1, 4, 7);
    const Polygon b = oracle::random_star_polygon(rng, {pos(rng), pos(rng)}, 1, 4, 9);
    const double ab = intersection_area(a, b);
    const double ba = intersection_area(b, a);
    const double aa = oracle::shoelace(a.exterior), bb = oracle::shoelace(b.exterior);
    CHECK(std::abs(ab - ba) <= 1e-9 * std::max({ab, ba, 1e-300}));
    CHECK(ab <= std::min(aa, bb) + 1e-9 * std::max(aa, bb));
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("clipping against a covering grid partitions the polygon")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Polygon p = oracle::random_star_polygon(rng, {1234.5, 987.25}, 300, 1400, 11);
    const Grid g = tessellate_grid(bounds(p), 250);
    double total = 0.0;
    for (int row = 0; row < g.ny(); ++row) {
      for (int col = 0; col < g.nx(); ++col) total += intersection_area(MultiPolygon{p}, g.cell_box({col, row}));
    }
    const double expected = oracle::shoelace(p.exterior);
    CHECK(std::abs(total - expected) <= 1e-6 * expected);
  }
}

TEST_CASE("PolygonIndex query")
{
  std::vector<MultiPolygon> shapes;
  for (int i = 0; i < 10; ++i) shapes.push_back({square(3.0 * i, 0, 2)});
  const PolygonIndex index(shapes);

  CHECK(index.query(square(100, 100)).empty());
  const auto hit = index.query(shapes[4].front());
  CHECK(std::find(hit.begin(), hit.end(), 4u) != hit.end());

  const auto three = index.query(box_polygon({4.5, 0.5, 11.5, 1.5}));
  for (std::size_t id = 0; id < shapes.size(); ++id) {
    if (oracle::boxes_overlap(bounds(shapes[id]), {4.5, 0.5, 11.5, 1.5})) {
      CHECK(std::find(three.begin(), three.end(), id) != three.end());
    }
  }
  CHECK(three.size() >= 3);
}

TEST_CASE("PolygonIndex never misses an overlapping box")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0, 100);
  std::vector<MultiPolygon> shapes;
  for (int i = 0; i < 300; ++i) shapes.push_back({oracle::random_star_polygon(rng, {pos(rng), pos(rng)}, 0.5, 4, 6)});
  const PolygonIndex index(shapes);
  for (int q = 0; q < 200; ++q) {
    const Polygon probe = oracle::random_star_polygon(rng, {pos(rng), pos(rng)}, 1, 8, 5);
    const auto hits = index.query(probe);
    for (std::size_t id = 0; id < shapes.size(); ++id) {
      if (oracle::boxes_overlap(bounds(shapes[id]), bounds(probe))) {
        CHECK(std::binary_search(hits.begin(), hits.end(), id));
      }
    }
  }
}
