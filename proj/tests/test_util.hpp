// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/synth.hpp"
#include "splatgym/render/camera.hpp"

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace splatgym::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("splatgym_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Quatf random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  Quatf q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

/// Random splats in a cube of half-width `extent` around `center`.
inline std::vector<SplatPrimitive> random_splats(std::mt19937_64& rng, std::size_t n, const Vec3f& center,
                                                 float extent, float min_scale = 0.02f, float max_scale = 0.3f) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f), u01(0.0f, 1.0f);
  std::vector<SplatPrimitive> out(n);
  for (auto& s : out) {
    s.position = center + extent * Vec3f(u(rng), u(rng), u(rng));
    s.rotation = random_rotation(rng);
    for (int k = 0; k < 3; ++k) s.scale[k] = min_scale + (max_scale - min_scale) * u01(rng);
    s.opacity = u01(rng);
    s.set_base_color(Vec3f(u01(rng), u01(rng), u01(rng)));
  }
  return out;
}

/// Scene with only splats and a token floor so it validates.
inline std::shared_ptr<GaussianSplatScene> splat_scene(std::vector<SplatPrimitive> splats, std::string id = "splats") {
  auto s = std::make_shared<GaussianSplatScene>();
  s->scene_id = std::move(id);
  s->splats = std::move(splats);
  MeshBuilder mb;
  mb.floor(-5, -5, 5, 5, -2.0);
  s->mesh = mb.build();
  Aabbd spawn;
  spawn.lo = spawn.hi = Vec3d(0, 0, -2.0);
  s->spawn_regions.push_back(spawn);
  return s;
}

/// Camera at distance ~[2.5, 4] from the origin looking near it.
inline CameraView random_camera(std::mt19937_64& rng, int width, int height, std::size_t env = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3d dir(u(rng), u(rng), u(rng));
  if (dir.norm() < 1e-3) dir = Vec3d::UnitX();
  dir.normalize();
  const double dist = 2.5 + 0.75 * (u(rng) + 1.0);
  const Vec3d target(0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng));
  CameraView cam;
  cam.env = env;
  cam.world_from_camera = look_at(target + dist * dir, target, std::abs(dir.z()) > 0.95 ? Vec3d::UnitX() : Vec3d::UnitZ());
  cam.intrinsics = Intrinsics::from_fov(width, height, (50.0 + 40.0 * (u(rng) + 1.0) / 2.0) * kPi / 180.0);
  return cam;
}

/// Random triangle soup: `n` triangles with vertices in [-1, 1]^3.
inline CollisionMesh random_mesh(std::mt19937_64& rng, std::size_t n, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent), small(-0.3, 0.3);
  std::vector<Vec3d> v;
  std::vector<Triangle> t;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3d c(u(rng), u(rng), u(rng));
    const auto k = static_cast<std::uint32_t>(v.size());
    for (int j = 0; j < 3; ++j) v.push_back(c + Vec3d(small(rng), small(rng), small(rng)));
    t.push_back({k, k + 1, k + 2});
  }
  return CollisionMesh(v, t);
}

}  // namespace splatgym::testing
