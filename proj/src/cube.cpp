#include "stacc/cube.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "binary_io.hpp"
#include "stacc/csv.hpp"

namespace stacc {

namespace {
constexpr char kMagic[8] = {'S', 'T', 'C', 'U', 'B', 'E', '0', '1'};
}

SpaceTimeCube::SpaceTimeCube(const Grid& grid, int nt, double fill)
    : grid_(grid), nt_(nt)
{
  if (nt <= 0) throw std::invalid_argument("cube needs at least one time layer");
  values_.assign(static_cast<std::size_t>(grid.nx()) * grid.ny() * nt, fill);
}

SpaceTimeCube assemble_cube(const std::vector<AccessibilitySurface>& surfaces, const Grid& grid)
{
  std::array<const AccessibilitySurface*, kHours> by_hour{};
  for (const AccessibilitySurface& s : surfaces) {
    if (!s.hour) throw std::invalid_argument("static surface cannot be placed in the cube");
    const int h = *s.hour;
    if (h < 0 || h >= kHours) throw std::invalid_argument("surface hour " + std::to_string(h) + " outside 0..23");
    if (by_hour[h]) throw std::invalid_argument("duplicate surface for hour " + std::to_string(h));
    by_hour[h] = &s;
  }
  for (int h = 0; h < kHours; ++h) {
    if (!by_hour[h]) throw std::invalid_argument("missing surface for hour " + std::to_string(h));
  }

  SpaceTimeCube cube(grid, kHours);
  for (int h = 0; h < kHours; ++h) {
    const AccessibilitySurface& s = *by_hour[h];
    if (s.cells.size() != s.values.size()) throw std::invalid_argument("surface cells and values differ in length");
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
      if (s.cells[i] < 0 || s.cells[i] >= grid.cell_count()) {
        throw std::invalid_argument("surface for hour " + std::to_string(h) + " references cell " +
                                    std::to_string(s.cells[i]) + " outside the cube grid");
      }
      const CellIndex c = grid.index(s.cells[i]);
      cube.at(c.col, c.row, h) = s.values[i];
    }
  }
  return cube;
}

double trilinear_sample(const SpaceTimeCube& cube, double x, double y, double t)
{
  const double mx = cube.nx() - 1, my = cube.ny() - 1, mt = cube.nt() - 1;
  if (!(x >= 0 && x <= mx && y >= 0 && y <= my && t >= 0 && t <= mt)) {
    std::ostringstream msg;
    msg << "sample (" << x << ", " << y << ", " << t << ") outside the lattice hull";
    throw std::out_of_range(msg.str());
  }
  auto base = [](double v, double max) { return std::min(static_cast<int>(std::floor(v)), std::max(0, int(max) - 1)); };
  const int x0 = cube.nx() > 1 ? base(x, mx) : 0;
  const int y0 = cube.ny() > 1 ? base(y, my) : 0;
  const int t0 = cube.nt() > 1 ? base(t, mt) : 0;
  const int x1 = std::min(x0 + 1, cube.nx() - 1);
  const int y1 = std::min(y0 + 1, cube.ny() - 1);
  const int t1 = std::min(t0 + 1, cube.nt() - 1);
  const double fx = x - x0, fy = y - y0, ft = t - t0;

  double c[2][2][2];
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        const double v = cube.at(i ? x1 : x0, j ? y1 : y0, k ? t1 : t0);
        if (is_sentinel(v)) return kVoxelSentinel;
        c[k][j][i] = v;
      }
    }
  }
  auto lerp = [](double a, double b, double f) { return a + f * (b - a); };
  const double c00 = lerp(c[0][0][0], c[0][0][1], fx);
  const double c10 = lerp(c[0][1][0], c[0][1][1], fx);
  const double c01 = lerp(c[1][0][0], c[1][0][1], fx);
  const double c11 = lerp(c[1][1][0], c[1][1][1], fx);
  return lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), ft);
}

double percentile(std::vector<double> values, double p)
{
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return is_sentinel(v); }),
               values.end());
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

double percentile(const SpaceTimeCube& cube, double p) { return percentile(cube.values(), p); }

void write_cube(const SpaceTimeCube& cube, const std::filesystem::path& path)
{
  nlohmann::ordered_json header;
  header["nx"] = cube.nx();
  header["ny"] = cube.ny();
  header["nt"] = cube.nt();
  header["origin_x"] = cube.grid().origin_x();
  header["origin_y"] = cube.grid().origin_y();
  header["cell_size"] = cube.grid().cell_size();
  header["hour0"] = cube.hour0;
  header["transform"] = cube.transform;
  header["value_unit"] = cube.value_unit;
  const std::string text = header.dump();

  std::ofstream out = csv::open_output(path);
  out.write(kMagic, sizeof(kMagic));
  detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  detail::put_f32_array(out, cube.values());
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SpaceTimeCube read_cube(const std::filesystem::path& path)
{
  std::ifstream in = csv::open_input(path);
  const std::vector<unsigned char> bytes = detail::slurp(in);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw std::runtime_error(path.string() + ": not an STCUBE01 file (magic/version mismatch)");
  }
  const std::uint32_t len = detail::get_u32(bytes.data() + 8);
  if (bytes.size() < 12ull + len) throw std::runtime_error(path.string() + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + len);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  const Grid grid(header.at("origin_x").get<double>(), header.at("origin_y").get<double>(),
                  header.at("cell_size").get<double>(), header.at("nx").get<int>(), header.at("ny").get<int>());
  SpaceTimeCube cube(grid, header.at("nt").get<int>());
  cube.hour0 = header.value("hour0", 0);
  cube.transform = header.value("transform", "none");
  cube.value_unit = header.value("value_unit", "");
  cube.nonstandard_time_axis = cube.nt() != kHours;

  const std::size_t expected = 4 * cube.voxel_count();
  const std::size_t actual = bytes.size() - 12 - len;
  if (actual != expected) {
    throw std::runtime_error(path.string() + ": payload is " + std::to_string(actual) + " bytes, expected " +
                             std::to_string(expected));
  }
  cube.values() = detail::get_f32_array(bytes.data() + 12 + len, cube.voxel_count());
  return cube;
}

void write_cube_slice(const SpaceTimeCube& cube, int t, const std::filesystem::path& path)
{
  if (t < 0 || t >= cube.nt()) throw std::out_of_range("slice " + std::to_string(t) + " outside the cube");
  std::ofstream out = csv::open_output(path);
  out << "cell_col,cell_row,hour,value\n";
  for (int y = 0; y < cube.ny(); ++y) {
    for (int x = 0; x < cube.nx(); ++x) {
      const double v = cube.at(x, y, t);
      if (is_sentinel(v)) continue;
      out << x << ',' << y << ',' << (cube.hour0 + t) << ',' << csv::format_double(v) << '\n';
    }
  }
}

void write_mesh_obj(const TriangleMesh& mesh, const SpaceTimeCube& cube, const std::filesystem::path& path)
{
  std::ofstream out = csv::open_output(path);
  const Grid& g = cube.grid();
  for (const Vertex& v : mesh.vertices) {
    out << "v " << csv::format_double(g.origin_x() + (v.x + 0.5) * g.cell_size()) << ' '
        << csv::format_double(g.origin_y() + (v.y + 0.5) * g.cell_size()) << ' '
        << csv::format_double(cube.hour0 + v.t) << '\n';
  }
  for (const auto& tri : mesh.triangles) out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
}

}  // namespace stacc
