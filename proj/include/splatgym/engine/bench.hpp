// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/engine/rollout.hpp"

#include <json.hpp>

#include <chrono>

namespace splatgym {

struct BenchReport {
  std::size_t n_envs = 0;
  std::size_t n_scenes = 0;
  int width = 0;
  int height = 0;
  int render_every = 0;
  int blur_k = 1;
  int workers = 1;
  double wall_s = 0.0;
  std::int64_t control_steps = 0;  // per env
  double steps_per_second = 0.0;   // env-steps per second
  double renders_per_second = 0.0;
  double project_s = 0.0;
  double sort_s = 0.0;
  double composite_s = 0.0;
  double physics_s = 0.0;

  nlohmann::json to_json() const {
    return {{"type", "bench"},
            {"n_envs", n_envs},
            {"n_scenes", n_scenes},
            {"width", width},
            {"height", height},
            {"render_every", render_every},
            {"blur_k", blur_k},
            {"workers", workers},
            {"wall_s", wall_s},
            {"control_steps", control_steps},
            {"steps_per_second", steps_per_second},
            {"renders_per_second", renders_per_second},
            {"breakdown", {{"project_s", project_s}, {"sort_s", sort_s}, {"composite_s", composite_s},
                           {"physics_s", physics_s}}}};
  }
};

/// Times `steps` control steps of a follow-policy rollout after `warmup`
/// untimed steps.
inline BenchReport run_bench(std::vector<std::shared_ptr<const GaussianSplatScene>> scenes, const EngineConfig& config,
                             std::int64_t steps, std::int64_t warmup = 2) {
  const std::size_t n_scenes = scenes.size();
  VecEnv env(std::move(scenes), config);
  ScriptedPolicy policy(PolicyKind::Follow, env.size(), config.seed);
  env.reset();
  std::vector<float> actions;
  std::vector<DriveCommand> drives;
  auto one_step = [&] {
    policy.act(env, actions, drives);
    env.set_drive(drives);
    env.step(actions);
  };
  for (std::int64_t k = 0; k < warmup; ++k) one_step();
  env.reset();
  env.reset_timings();

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  for (std::int64_t k = 0; k < steps; ++k) one_step();
  const double wall = std::chrono::duration<double>(clock::now() - t0).count();

  BenchReport r;
  r.n_envs = env.size();
  r.n_scenes = n_scenes;
  r.width = config.camera.width;
  r.height = config.camera.height;
  r.render_every = config.render_every;
  r.blur_k = config.camera.blur_k;
  r.workers = config.workers;
  r.wall_s = wall;
  r.control_steps = steps;
  r.steps_per_second = wall > 0.0 ? static_cast<double>(steps) * static_cast<double>(env.size()) / wall : 0.0;
  r.renders_per_second = wall > 0.0 ? static_cast<double>(env.timings().renders) / wall : 0.0;
  r.project_s = env.render_stats().project_s;
  r.sort_s = env.render_stats().sort_s;
  r.composite_s = env.render_stats().composite_s;
  r.physics_s = env.timings().physics_s;
  return r;
}

}  // namespace splatgym
