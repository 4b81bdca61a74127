// Marching cubes. The 256-case triangle table is built once from per-face
// rules: on each face, crossing points are paired so that diagonal
// ("ambiguous") inside corners are separated. Neighboring cells see the same
// face values and therefore make the same choice, so meshes are watertight.

#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "stacc/cube.hpp"

namespace stacc {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b)
{
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Corner c has offsets (c & 1, (c >> 1) & 1, (c >> 2) & 1).
Vec3 corner_pos(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

struct CubeEdge {
  int a, b;  // a is the lower corner
  int axis;
};

std::array<CubeEdge, 12> make_edges()
{
  std::array<CubeEdge, 12> edges{};
  int n = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int bit = 1 << axis;
    for (int c = 0; c < 8; ++c) {
      if (c & bit) continue;
      edges[n++] = {c, c | bit, axis};
    }
  }
  return edges;
}

const std::array<CubeEdge, 12> kEdges = make_edges();

int edge_between(int a, int b)
{
  for (int e = 0; e < 12; ++e) {
    if ((kEdges[e].a == a && kEdges[e].b == b) || (kEdges[e].a == b && kEdges[e].b == a)) return e;
  }
  return -1;
}

Vec3 edge_mid(int e)
{
  const Vec3 a = corner_pos(kEdges[e].a), b = corner_pos(kEdges[e].b);
  return {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2};
}

using CaseTable = std::array<std::vector<std::array<int, 3>>, 256>;

CaseTable build_table()
{
  CaseTable table;
  for (int mask = 0; mask < 256; ++mask) {
    auto inside = [mask](int c) { return (mask >> c) & 1; };
    std::array<int, 12> next;
    next.fill(-1);

    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      for (int side = 0; side < 2; ++side) {
        std::array<int, 4> q;
        const int uv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        for (int k = 0; k < 4; ++k) q[k] = (side << axis) | (uv[k][0] << u) | (uv[k][1] << v);
        Vec3 normal{0, 0, 0};
        normal[axis] = side ? 1.0 : -1.0;

        std::array<int, 4> face_edge;
        int crossings = 0;
        for (int k = 0; k < 4; ++k) {
          face_edge[k] = edge_between(q[k], q[(k + 1) % 4]);
          if (inside(q[k]) != inside(q[(k + 1) % 4])) ++crossings;
        }
        if (crossings == 0) continue;

        std::vector<std::array<int, 2>> segments;  // face-edge slots
        if (crossings == 4) {
          for (int k = 0; k < 4; ++k) {
            if (inside(q[k])) segments.push_back({(k + 3) % 4, k});
          }
        } else {
          std::array<int, 2> s{};
          int n = 0;
          for (int k = 0; k < 4; ++k) {
            if (inside(q[k]) != inside(q[(k + 1) % 4])) s[n++] = k;
          }
          segments.push_back(s);
        }

        Vec3 ci{0, 0, 0}, co{0, 0, 0};
        int ni = 0, no = 0;
        for (int k = 0; k < 4; ++k) {
          const Vec3 p = corner_pos(q[k]);
          Vec3& acc = inside(q[k]) ? ci : co;
          (inside(q[k]) ? ni : no)++;
          for (int d = 0; d < 3; ++d) acc[d] += p[d];
        }
        for (int d = 0; d < 3; ++d) {
          ci[d] /= ni;
          co[d] /= no;
        }

        for (const auto& seg : segments) {
          int e0 = face_edge[seg[0]], e1 = face_edge[seg[1]];
          const Vec3 p = edge_mid(e0), r = edge_mid(e1);
          const Vec3 mid{(p[0] + r[0]) / 2, (p[1] + r[1]) / 2, (p[2] + r[2]) / 2};
          Vec3 toward_inside;
          if ((seg[0] + 1) % 4 == seg[1]) {
            // Adjacent face edges share corner q[seg[1]].
            const int shared = q[seg[1]];
            const Vec3 sp = corner_pos(shared);
            toward_inside = inside(shared) ? sub(sp, mid) : sub(mid, sp);
          } else {
            toward_inside = sub(ci, co);
          }
          if (dot(cross(normal, sub(r, p)), toward_inside) < 0) std::swap(e0, e1);
          next[e0] = e1;
        }
      }
    }

    std::array<bool, 12> used{};
    for (int start = 0; start < 12; ++start) {
      if (next[start] < 0 || used[start]) continue;
      std::vector<int> loop;
      for (int e = start; !used[e]; e = next[e]) {
        used[e] = true;
        loop.push_back(e);
      }
      // The traced loop winds with its normal pointing into the inside
      // region; emit reversed.
      for (std::size_t k = 1; k + 1 < loop.size(); ++k) {
        table[mask].push_back({loop[0], loop[k + 1], loop[k]});
      }
    }
  }
  return table;
}

const CaseTable& case_table()
{
  static const CaseTable table = build_table();
  return table;
}

}  // namespace

TriangleMesh isosurface(const SpaceTimeCube& cube, double isovalue)
{
  TriangleMesh mesh;
  if (!std::isfinite(isovalue)) return mesh;
  const CaseTable& table = case_table();
  const int nx = cube.nx(), ny = cube.ny(), nt = cube.nt();

  std::unordered_map<std::uint64_t, std::uint32_t> vertex_of_edge;
  auto lattice_vertex = [&](int x, int y, int t, int e) -> std::uint32_t {
    const CubeEdge& ce = kEdges[e];
    const int ax = x + (ce.a & 1), ay = y + ((ce.a >> 1) & 1), at = t + ((ce.a >> 2) & 1);
    const std::uint64_t key = static_cast<std::uint64_t>(cube.offset(ax, ay, at)) * 3 + ce.axis;
    const auto it = vertex_of_edge.find(key);
    if (it != vertex_of_edge.end()) return it->second;
    const int bx = x + (ce.b & 1), by = y + ((ce.b >> 1) & 1), bt = t + ((ce.b >> 2) & 1);
    const double va = cube.at(ax, ay, at), vb = cube.at(bx, by, bt);
    const double f = (isovalue - va) / (vb - va);
    Vertex v{double(ax), double(ay), double(at)};
    if (ce.axis == 0) v.x += f;
    if (ce.axis == 1) v.y += f;
    if (ce.axis == 2) v.t += f;
    const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(v);
    vertex_of_edge.emplace(key, id);
    return id;
  };

  for (int t = 0; t + 1 < nt; ++t) {
    for (int y = 0; y + 1 < ny; ++y) {
      for (int x = 0; x + 1 < nx; ++x) {
        int mask = 0;
        bool valid = true;
        for (int c = 0; c < 8; ++c) {
          const double v = cube.at(x + (c & 1), y + ((c >> 1) & 1), t + ((c >> 2) & 1));
          if (is_sentinel(v)) {
            valid = false;
            break;
          }
          if (v >= isovalue) mask |= 1 << c;
        }
        if (!valid || mask == 0 || mask == 255) continue;
        for (const auto& tri : table[mask]) {
          const std::array<std::uint32_t, 3> ids{lattice_vertex(x, y, t, tri[0]), lattice_vertex(x, y, t, tri[1]),
                                                 lattice_vertex(x, y, t, tri[2])};
          const Vertex& a = mesh.vertices[ids[0]];
          const Vertex& b = mesh.vertices[ids[1]];
          const Vertex& c = mesh.vertices[ids[2]];
          const Vec3 n = cross(Vec3{b.x - a.x, b.y - a.y, b.t - a.t}, Vec3{c.x - a.x, c.y - a.y, c.t - a.t});
          if (dot(n, n) < 1e-24) continue;
          mesh.triangles.push_back(ids);
        }
      }
    }
  }
  return mesh;
}

}  // namespace stacc
