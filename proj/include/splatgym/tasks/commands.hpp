// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/scene.hpp"
#include "splatgym/physics/world.hpp"
#include "splatgym/tasks/rewards.hpp"

#include <random>

namespace splatgym {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(std::mt19937_64& rng) const {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

struct CommandConfig {
  TaskMode mode = TaskMode::Velocity;
  Range vx{-1.0, 1.0};
  Range vy{-0.5, 0.5};
  Range yaw_rate{-1.0, 1.0};
  Range goal_distance{1.0, 3.0};
  Range goal_bearing{-kPi, kPi};
  Range goal_yaw{-kPi, kPi};
  double goal_deadline = 8.0;
  Range spawn_yaw{-kPi, kPi};
};

/// Uniform spawn inside a uniformly chosen spawn region.
inline SpawnPose sample_spawn(const GaussianSplatScene& scene, const CommandConfig& cfg, std::mt19937_64& rng) {
  if (scene.spawn_regions.empty()) throw ConfigError("scene '" + scene.scene_id + "' has no spawn regions");
  std::size_t k = 0;
  if (scene.spawn_regions.size() > 1)
    k = std::uniform_int_distribution<std::size_t>(0, scene.spawn_regions.size() - 1)(rng);
  const Aabbd& box = scene.spawn_regions[k];
  SpawnPose p;
  for (int a = 0; a < 3; ++a) p.point[a] = Range{box.lo[a], box.hi[a]}.sample(rng);
  p.yaw = cfg.spawn_yaw.sample(rng);
  return p;
}

inline Command sample_command(const CommandConfig& cfg, const SpawnPose& spawn, std::mt19937_64& rng) {
  Command c;
  c.mode = cfg.mode;
  if (cfg.mode == TaskMode::Velocity) {
    c.lin_vel = Vec2d(cfg.vx.sample(rng), cfg.vy.sample(rng));
    c.yaw_rate = cfg.yaw_rate.sample(rng);
  } else {
    const double d = cfg.goal_distance.sample(rng);
    const double b = cfg.goal_bearing.sample(rng);
    c.goal_xy = spawn.point.head<2>() + d * Vec2d(std::cos(b), std::sin(b));
    c.goal_yaw = wrap_angle(cfg.goal_yaw.sample(rng));
    c.deadline = cfg.goal_deadline;
  }
  c.remaining = c.deadline;
  return c;
}

}  // namespace splatgym
