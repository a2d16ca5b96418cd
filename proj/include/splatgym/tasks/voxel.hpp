// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/mesh.hpp"
#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace splatgym {

/// Robot-centered box in the base yaw frame (x forward, y left, z up).
struct GridConfig {
  Vec3d min = Vec3d(-0.2, -0.5, -0.6);  // box corner relative to the base
  Vec3d extent = Vec3d(1.6, 1.0, 0.8);
  double cell = 0.1;
  double no_hit_height = -10.0;

  void validate() const {
    if (!(extent.minCoeff() > 0.0) || !(cell > 0.0)) throw ConfigError("grid: extents and cell size must be positive");
  }
  int nx() const { return static_cast<int>(std::llround(extent.x() / cell)); }
  int ny() const { return static_cast<int>(std::llround(extent.y() / cell)); }
  int nz() const { return static_cast<int>(std::llround(extent.z() / cell)); }
  double band() const { return 0.5 * std::sqrt(3.0) * cell; }
};

struct VoxelLabel {
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> occupancy;  // [ix][iy][iz]
  std::vector<double> heights;          // [ix][iy]

  bool occupied(int ix, int iy, int iz) const {
    return occupancy[(static_cast<std::size_t>(ix) * ny + iy) * nz + iz] != 0;
  }
  double height(int ix, int iy) const { return heights[static_cast<std::size_t>(ix) * ny + iy]; }
  std::size_t occupied_count() const {
    std::size_t n = 0;
    for (auto o : occupancy) n += o;
    return n;
  }
};

/// World position of voxel center (ix, iy, iz) for a base at `base` with `yaw`.
inline Vec3d voxel_center(const GridConfig& g, const Vec3d& base, double yaw, int ix, int iy, int iz) {
  const Vec3d local = g.min + g.cell * Vec3d(ix + 0.5, iy + 0.5, iz + 0.5);
  const double c = std::cos(yaw), s = std::sin(yaw);
  return base + Vec3d(c * local.x() - s * local.y(), s * local.x() + c * local.y(), local.z());
}

/// Occupancy by surface band (center within half a cell diagonal of the mesh)
/// and height scan by a downward ray per column from the top of the box.
inline VoxelLabel voxelize_ground_truth(const CollisionMesh& mesh, const Vec3d& base, double yaw, const GridConfig& g) {
  g.validate();
  VoxelLabel v;
  v.nx = g.nx();
  v.ny = g.ny();
  v.nz = g.nz();
  v.occupancy.assign(static_cast<std::size_t>(v.nx) * v.ny * v.nz, 0);
  v.heights.assign(static_cast<std::size_t>(v.nx) * v.ny, g.no_hit_height);
  const double band = g.band();
  const double band_sq = band * band;
  const double top = base.z() + g.min.z() + g.extent.z();
  for (int ix = 0; ix < v.nx; ++ix)
    for (int iy = 0; iy < v.ny; ++iy) {
      for (int iz = 0; iz < v.nz; ++iz) {
        const Vec3d p = voxel_center(g, base, yaw, ix, iy, iz);
        if (mesh.closest(p, band_sq))
          v.occupancy[(static_cast<std::size_t>(ix) * v.ny + iy) * v.nz + iz] = 1;
      }
      Vec3d origin = voxel_center(g, base, yaw, ix, iy, 0);
      origin.z() = top;
      if (auto hit = mesh.raycast(origin, Vec3d(0.0, 0.0, -1.0)))
        v.heights[static_cast<std::size_t>(ix) * v.ny + iy] = hit->point.z();
    }
  return v;
}

}  // namespace splatgym
