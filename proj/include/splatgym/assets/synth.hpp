// SPDX-License-Identifier: Apache-2.0
#pragma once

// Procedural scenes for tests, samples and benchmarks.

#include "splatgym/assets/scene.hpp"

#include <random>
#include <string>
#include <vector>

namespace splatgym {

class MeshBuilder {
 public:
  /// Quad a-b-c-d, counter-clockwise when seen from the side its normal faces.
  void quad(const Vec3d& a, const Vec3d& b, const Vec3d& c, const Vec3d& d) {
    const auto i = static_cast<std::uint32_t>(v_.size());
    v_.insert(v_.end(), {a, b, c, d});
    t_.push_back({i, i + 1, i + 2});
    t_.push_back({i, i + 2, i + 3});
  }

  /// Horizontal quad at height z with an upward normal.
  void floor(double x0, double y0, double x1, double y1, double z) {
    quad({x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z});
  }

  /// Closed box with outward normals.
  void box(const Vec3d& lo, const Vec3d& hi) {
    const double x0 = lo.x(), y0 = lo.y(), z0 = lo.z(), x1 = hi.x(), y1 = hi.y(), z1 = hi.z();
    quad({x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1});  // +z
    quad({x0, y0, z0}, {x0, y1, z0}, {x1, y1, z0}, {x1, y0, z0});  // -z
    quad({x1, y0, z0}, {x1, y1, z0}, {x1, y1, z1}, {x1, y0, z1});  // +x
    quad({x0, y0, z0}, {x0, y0, z1}, {x0, y1, z1}, {x0, y1, z0});  // -x
    quad({x0, y1, z0}, {x0, y1, z1}, {x1, y1, z1}, {x1, y1, z0});  // +y
    quad({x0, y0, z0}, {x1, y0, z0}, {x1, y0, z1}, {x0, y0, z1});  // -y
  }

  CollisionMesh build() const { return CollisionMesh(v_, t_); }

 private:
  std::vector<Vec3d> v_;
  std::vector<Triangle> t_;
};

/// Thin splat lying in the plane spanned by `u` and `v`.
inline SplatPrimitive surface_splat(const Vec3d& p, const Vec3d& u, const Vec3d& v, float tangent_sigma,
                                    float normal_sigma, const Vec3f& color, float opacity) {
  SplatPrimitive s;
  s.position = p.cast<float>();
  Mat3d r;
  r.col(0) = u.normalized();
  r.col(1) = v.normalized();
  r.col(2) = u.cross(v).normalized();
  s.rotation = Quatf(Quatd(r).normalized().cast<float>());
  s.scale = Vec3f(tangent_sigma, tangent_sigma, normal_sigma);
  s.opacity = opacity;
  s.set_base_color(color);
  return s;
}

/// Flat floor (z = 0) with a checkered splat carpet. `spacing` sets the splat pitch.
inline GaussianSplatScene make_flat_scene(double half_size = 5.0, double spacing = 0.25, std::string id = "flat") {
  GaussianSplatScene s;
  s.scene_id = std::move(id);
  MeshBuilder mb;
  mb.floor(-half_size, -half_size, half_size, half_size, 0.0);
  s.mesh = mb.build();
  const int n = static_cast<int>(std::floor(2.0 * half_size / spacing));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -half_size + (i + 0.5) * spacing, y = -half_size + (j + 0.5) * spacing;
      const bool dark = ((i / 2) + (j / 2)) % 2 == 0;
      const Vec3f c = dark ? Vec3f(0.25f, 0.3f, 0.35f) : Vec3f(0.8f, 0.78f, 0.7f);
      s.splats.push_back(surface_splat({x, y, 0.0}, Vec3d::UnitX(), Vec3d::UnitY(), static_cast<float>(0.6 * spacing),
                                       0.005f, c, 0.9f));
    }
  Aabbd spawn;
  spawn.lo = Vec3d(-0.5, -0.5, 0.0);
  spawn.hi = Vec3d(0.5, 0.5, 0.0);
  s.spawn_regions.push_back(spawn);
  return s;
}

/// Floor at z = 0 for x < edge_x and a plateau at `height` beyond it.
inline GaussianSplatScene make_step_scene(double height = 0.3, double edge_x = 0.0, double half_size = 3.0) {
  GaussianSplatScene s;
  s.scene_id = "step";
  MeshBuilder mb;
  mb.floor(-half_size, -half_size, edge_x, half_size, 0.0);
  mb.floor(edge_x, -half_size, half_size, half_size, height);
  mb.quad({edge_x, -half_size, 0.0}, {edge_x, half_size, 0.0}, {edge_x, half_size, height},
          {edge_x, -half_size, height});  // riser facing -x
  s.mesh = mb.build();
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j) {
      const double x = -half_size + (i + 0.5) * 2.0 * half_size / 24, y = -half_size + (j + 0.5) * 2.0 * half_size / 24;
      const double z = x < edge_x ? 0.0 : height;
      s.splats.push_back(surface_splat({x, y, z}, Vec3d::UnitX(), Vec3d::UnitY(), 0.15f, 0.005f,
                                       x < edge_x ? Vec3f(0.4f, 0.4f, 0.45f) : Vec3f(0.7f, 0.5f, 0.3f), 0.9f));
    }
  Aabbd spawn;
  spawn.lo = Vec3d(edge_x - 1.5, -0.5, 0.0);
  spawn.hi = Vec3d(edge_x - 0.5, 0.5, 0.0);
  s.spawn_regions.push_back(spawn);
  return s;
}

/// Axis-aligned cube [-0.5, 0.5]^3 with one splat per face.
inline GaussianSplatScene make_cube_scene() {
  GaussianSplatScene s;
  s.scene_id = "cube";
  MeshBuilder mb;
  mb.box(Vec3d::Constant(-0.5), Vec3d::Constant(0.5));
  s.mesh = mb.build();
  const Vec3d axes[3] = {Vec3d::UnitX(), Vec3d::UnitY(), Vec3d::UnitZ()};
  for (int a = 0; a < 3; ++a)
    for (int sign : {-1, 1}) {
      const Vec3d n = sign * axes[a];
      const Vec3d u = axes[(a + 1) % 3], v = axes[(a + 2) % 3];
      Vec3f c = Vec3f::Constant(0.2f);
      c[a] = sign > 0 ? 0.9f : 0.6f;
      s.splats.push_back(surface_splat(0.5 * n, u, v, 0.25f, 0.01f, c, 0.95f));
    }
  Aabbd spawn;
  spawn.lo = Vec3d(-0.1, -0.1, 0.5);
  spawn.hi = Vec3d(0.1, 0.1, 0.5);
  s.spawn_regions.push_back(spawn);
  return s;
}

/// Furnished room: floor, four walls, a box obstacle and a yellow penalty
/// patch, covered by `splat_count` surface splats.
inline GaussianSplatScene make_room_scene(std::size_t splat_count = 120000, std::uint64_t seed = 7,
                                          std::string id = "room") {
  GaussianSplatScene s;
  s.scene_id = std::move(id);
  const double h = 4.0, wall = 2.5;
  const Vec3d box_lo(1.5, 1.0, 0.0), box_hi(2.3, 1.8, 0.6);
  MeshBuilder mb;
  mb.floor(-h, -h, h, h, 0.0);
  mb.quad({-h, -h, 0}, {-h, h, 0}, {-h, h, wall}, {-h, -h, wall});  // -x wall, normal +x
  mb.quad({h, h, 0}, {h, -h, 0}, {h, -h, wall}, {h, h, wall});      // +x wall, normal -x
  mb.quad({h, -h, 0}, {-h, -h, 0}, {-h, -h, wall}, {h, -h, wall});  // -y wall, normal +y
  mb.quad({-h, h, 0}, {h, h, 0}, {h, h, wall}, {-h, h, wall});      // +y wall, normal -y
  mb.box(box_lo, box_hi);
  s.mesh = mb.build();

  PenaltyRegion patch;
  patch.polygon = {{0.5, -1.5}, {1.5, -1.5}, {1.5, -0.5}, {0.5, -0.5}};
  patch.weight = -5.0;
  s.penalty_regions.push_back(patch);

  Aabbd spawn;
  spawn.lo = Vec3d(-1.5, -1.5, 0.0);
  spawn.hi = Vec3d(0.0, 1.5, 0.0);
  s.spawn_regions.push_back(spawn);

  // Surfaces weighted by area: floor 64, walls 4 x 20, obstacle ~2.6.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<float> jitter(0.0f, 0.04f);
  const double floor_area = 4 * h * h, wall_area = 2 * h * wall, box_area = 2.6;
  const double total = floor_area + 4 * wall_area + box_area;
  s.splats.reserve(splat_count);
  for (std::size_t i = 0; i < splat_count; ++i) {
    double pick = u01(rng) * total;
    Vec3d p, u, v;
    Vec3f c;
    if ((pick -= floor_area) < 0.0) {
      p = Vec3d(-h + 2 * h * u01(rng), -h + 2 * h * u01(rng), 0.0);
      u = Vec3d::UnitX();
      v = Vec3d::UnitY();
      const bool dark = (static_cast<int>(std::floor(p.x() * 2)) + static_cast<int>(std::floor(p.y() * 2))) % 2 == 0;
      c = dark ? Vec3f(0.35f, 0.25f, 0.18f) : Vec3f(0.62f, 0.48f, 0.33f);
      if (patch.contains(p.head<2>())) c = Vec3f(0.95f, 0.85f, 0.1f);
    } else if ((pick -= 4 * wall_area) < 0.0) {
      const int w = static_cast<int>(u01(rng) * 4) % 4;
      const double a = -h + 2 * h * u01(rng), z = wall * u01(rng);
      switch (w) {
        case 0: p = Vec3d(-h, a, z); u = Vec3d::UnitY(); v = Vec3d::UnitZ(); break;
        case 1: p = Vec3d(h, a, z); u = Vec3d::UnitY(); v = Vec3d::UnitZ(); break;
        case 2: p = Vec3d(a, -h, z); u = Vec3d::UnitX(); v = Vec3d::UnitZ(); break;
        default: p = Vec3d(a, h, z); u = Vec3d::UnitX(); v = Vec3d::UnitZ(); break;
      }
      const float shade = 0.55f + 0.3f * static_cast<float>(z / wall);
      const Vec3f tint[4] = {{0.6f, 0.7f, 0.8f}, {0.8f, 0.7f, 0.6f}, {0.7f, 0.8f, 0.65f}, {0.75f, 0.7f, 0.8f}};
      c = shade * tint[w];
    } else {
      // Obstacle: top or one of the four sides.
      const Vec3d e = box_hi - box_lo;
      const double a = u01(rng), b = u01(rng);
      const int face = static_cast<int>(u01(rng) * 5) % 5;
      switch (face) {
        case 0: p = box_lo + Vec3d(a * e.x(), b * e.y(), e.z()); u = Vec3d::UnitX(); v = Vec3d::UnitY(); break;
        case 1: p = box_lo + Vec3d(0.0, a * e.y(), b * e.z()); u = Vec3d::UnitY(); v = Vec3d::UnitZ(); break;
        case 2: p = box_lo + Vec3d(e.x(), a * e.y(), b * e.z()); u = Vec3d::UnitY(); v = Vec3d::UnitZ(); break;
        case 3: p = box_lo + Vec3d(a * e.x(), 0.0, b * e.z()); u = Vec3d::UnitX(); v = Vec3d::UnitZ(); break;
        default: p = box_lo + Vec3d(a * e.x(), e.y(), b * e.z()); u = Vec3d::UnitX(); v = Vec3d::UnitZ(); break;
      }
      c = face == 0 ? Vec3f(0.2f, 0.35f, 0.6f) : Vec3f(0.15f, 0.25f, 0.45f);
    }
    for (int k = 0; k < 3; ++k) c[k] = std::clamp(c[k] + jitter(rng), 0.0f, 1.0f);
    const auto tangent = static_cast<float>(0.02 + 0.03 * u01(rng));
    const auto opacity = static_cast<float>(0.5 + 0.45 * u01(rng));
    s.splats.push_back(surface_splat(p, u, v, tangent, 0.004f, c, opacity));
  }
  return s;
}

}  // namespace splatgym
