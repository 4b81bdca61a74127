// Independent reference implementations used only by the tests. Nothing in
// here calls into the kernels it checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stacc/geometry.hpp"
#include "stacc/network.hpp"

namespace stacc::oracle {

/// All-pairs shortest paths over node positions; +inf when unreachable.
inline std::vector<std::vector<double>> floyd_warshall(std::size_t n, const std::vector<EdgeRecord>& edges,
                                                       const std::vector<NodeRecord>& nodes, bool directed)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  auto pos = [&](NodeId id) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].id == id) return i;
    }
    return n;
  };
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const EdgeRecord& e : edges) {
    const std::size_t a = pos(e.from), b = pos(e.to);
    d[a][b] = std::min(d[a][b], e.length);
    if (!directed) d[b][a] = std::min(d[b][a], e.length);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  return d;
}

/// Power/exponential/gaussian decay written out independently, with the
/// floor and the "unreachable weighs nothing" rule.
inline double reference_decay(int family, double beta, double floor, double d)
{
  if (std::isnan(d)) return 0.0;
  d = std::max(d, floor);
  if (family == 0) return 1.0 / std::pow(d, beta);
  if (family == 1) return 1.0 / std::exp(beta * d);
  return 1.0 / std::exp(d * d / beta);
}

/// Direct evaluation of A_i = sum_j [S_j f(d_ij) / sum_k D_k f(d_kj)] with
/// plain loops and long double accumulation; each denominator is formed
/// once per j. `cost(i, j)` is the impedance between residential i and
/// employment j. Terms with a zero denominator contribute nothing.
template <typename Cost, typename Weight>
std::vector<double> direct_two_step(const std::vector<double>& supply, const std::vector<double>& demand,
                                    Cost cost, Weight weight)
{
  std::vector<long double> denom(supply.size(), 0.0L);
  for (std::size_t j = 0; j < supply.size(); ++j) {
    for (std::size_t k = 0; k < demand.size(); ++k) {
      denom[j] += static_cast<long double>(demand[k]) * weight(cost(k, j));
    }
  }
  std::vector<double> out(demand.size(), 0.0);
  for (std::size_t i = 0; i < demand.size(); ++i) {
    long double a = 0.0L;
    for (std::size_t j = 0; j < supply.size(); ++j) {
      if (denom[j] > 0.0L) a += static_cast<long double>(supply[j]) * weight(cost(i, j)) / denom[j];
    }
    out[i] = static_cast<double>(a);
  }
  return out;
}

inline bool boxes_overlap(const Box& a, const Box& b)
{
  return !(a.max_x < b.min_x || b.max_x < a.min_x || a.max_y < b.min_y || b.max_y < a.min_y);
}

/// Simple (star-shaped) polygon around `center` with `k` vertices.
inline Polygon random_star_polygon(std::mt19937_64& rng, Point center, double r_min, double r_max, int k)
{
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::uniform_real_distribution<double> jitter(0.1, 0.9);
  Polygon p;
  const double step = 2.0 * M_PI / k;
  for (int i = 0; i < k; ++i) {
    const double a = (i + jitter(rng)) * step;
    const double r = radius(rng);
    p.exterior.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  p.exterior.push_back(p.exterior.front());
  return p;
}

/// Shoelace area of a simple ring.
inline double shoelace(const Ring& r)
{
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) s += r[i].x * r[i + 1].y - r[i + 1].x * r[i].y;
  return std::abs(s) / 2.0;
}

/// Ordinary least squares y = a + b x, accumulated in long double.
struct Line {
  double intercept;
  double slope;
};

inline Line least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const long double n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {static_cast<double>((sy - slope * sx) / n), static_cast<double>(slope)};
}

}  // namespace stacc::oracle
