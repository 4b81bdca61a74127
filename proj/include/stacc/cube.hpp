// Space-time cube: (x, y, hour) lattice of accessibility values, sampling,
// percentiles, isosurfaces and the STCUBE01 file format.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <string>
#include <vector>

#include "stacc/accessibility.hpp"
#include "stacc/geometry.hpp"

namespace stacc {

/// Lattice value for an inactive voxel.
inline constexpr double kVoxelSentinel = std::numeric_limits<double>::quiet_NaN();
inline bool is_sentinel(double v) { return std::isnan(v); }

class SpaceTimeCube {
 public:
  SpaceTimeCube(const Grid& grid, int nt, double fill = kVoxelSentinel);

  const Grid& grid() const { return grid_; }
  int nx() const { return grid_.nx(); }
  int ny() const { return grid_.ny(); }
  int nt() const { return nt_; }
  std::size_t voxel_count() const { return values_.size(); }

  /// x fastest, then y, then t.
  std::size_t offset(int x, int y, int t) const
  {
    return (static_cast<std::size_t>(t) * grid_.ny() + y) * grid_.nx() + x;
  }
  double at(int x, int y, int t) const { return values_[offset(x, y, t)]; }
  double& at(int x, int y, int t) { return values_[offset(x, y, t)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  int hour0 = 0;
  std::string transform = "log1p";  // recommended display transform: none | log1p
  std::string value_unit = "accessibility";
  /// Set by read_cube when nt != 24.
  bool nonstandard_time_axis = false;

 private:
  Grid grid_;
  int nt_;
  std::vector<double> values_;
};

/// Exactly one surface per hour 0..23. Cells absent from a surface are
/// left as sentinels.
SpaceTimeCube assemble_cube(const std::vector<AccessibilitySurface>& surfaces, const Grid& grid);

/// Trilinear blend in lattice coordinates (voxel (i,j,k) sits at x=i,
/// y=j, t=k). Returns the sentinel if any of the 8 corners is inactive;
/// throws std::out_of_range outside [0,nx-1]x[0,ny-1]x[0,nt-1].
double trilinear_sample(const SpaceTimeCube& cube, double x, double y, double t);

/// Linear interpolation between order statistics of the valid voxels at
/// rank (n-1) p / 100.
double percentile(const SpaceTimeCube& cube, double p);
double percentile(std::vector<double> values, double p);

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

struct TriangleMesh {
  std::vector<Vertex> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// Marching cubes over cells whose 8 corners are all valid. The region
/// value >= isovalue is "inside"; triangle winding gives normals pointing
/// out of that region. Vertices on shared lattice edges are shared.
TriangleMesh isosurface(const SpaceTimeCube& cube, double isovalue);

/// Magic "STCUBE01", uint32 LE header length, JSON header {nx, ny, nt,
/// origin_x, origin_y, cell_size, hour0, transform, value_unit}, then
/// nx*ny*nt float32 LE values, x fastest, NaN for inactive voxels.
void write_cube(const SpaceTimeCube& cube, const std::filesystem::path& path);
SpaceTimeCube read_cube(const std::filesystem::path& path);

/// `cell_col,cell_row,hour,value` for one layer, valid voxels only.
void write_cube_slice(const SpaceTimeCube& cube, int t, const std::filesystem::path& path);

/// Wavefront OBJ (x, y in meters, t in hours).
void write_mesh_obj(const TriangleMesh& mesh, const SpaceTimeCube& cube, const std::filesystem::path& path);

}  // namespace stacc
