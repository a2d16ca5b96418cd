// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/registry.hpp"
#include "splatgym/engine/config.hpp"
#include "splatgym/physics/world.hpp"
#include "splatgym/render/renderer.hpp"
#include "splatgym/sensor/camera_sensor.hpp"
#include "splatgym/tasks/commands.hpp"
#include "splatgym/tasks/observation.hpp"
#include "splatgym/tasks/penalty.hpp"
#include "splatgym/tasks/rewards.hpp"
#include "splatgym/tasks/termination.hpp"
#include "splatgym/tasks/voxel.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace splatgym {

/// Accumulated wall-clock time of the non-render phases.
struct EngineTimings {
  double physics_s = 0.0;
  double tasks_s = 0.0;
  double render_s = 0.0;
  std::size_t renders = 0;  // frames produced (one per camera, blur samples not counted)
};

/// N environments stepped together. Every per-env buffer is contiguous and
/// row-major: rgb (N,H,W,3) u8, depth (N,H,W) f32, proprio (N,D) f32,
/// rewards (N,) f32, dones (N,) u8. Buffers stay valid and keep their
/// addresses until the VecEnv is destroyed; contents change on step/reset.
///
/// A step applies actions, advances physics, scores rewards, auto-resets
/// finished envs and renders every env whose episode step falls on the
/// render schedule. Other envs keep showing their last frame.
class VecEnv {
 public:
  VecEnv(std::vector<std::shared_ptr<const GaussianSplatScene>> scenes, EngineConfig config)
      : cfg_((config.validate(), std::move(config))),
        registry_(std::move(scenes), cfg_.n_envs),
        schedule_(cfg_.schedule()),
        sensor_(cfg_.camera_sensor()),
        render_cfg_(cfg_.render_config()),
        renderer_(cfg_.workers),
        physics_(registry_, cfg_.physics, cfg_.workers),
        batch_(physics_.make_batch()) {
    const std::size_t n = cfg_.n_envs;
    for (std::size_t s = 0; s < registry_.scene_count(); ++s)
      if (registry_.scene(s).spawn_regions.empty())
        throw ConfigError("scene '" + registry_.scene(s).scene_id + "' has no spawn regions");
    commands_.resize(n);
    rngs_.resize(n);
    drives_.assign(n, DriveCommand{});
    frames_.resize(n, render_cfg_.height, render_cfg_.width);
    frame_step_.assign(n, -1);
    rendered_.assign(n, 0);
    proprio_.assign(n * proprio_dim(), 0.0f);
    rewards_.assign(n, 0.0f);
    dones_.assign(n, 0);
    last_status_.assign(n, EpisodeStatus::Running);
    last_fault_.assign(n, 0);
    breakdown_.resize(n);
    episode_.assign(n, 0);
  }

  const EngineConfig& config() const { return cfg_; }
  const SceneRegistry& registry() const { return registry_; }
  const RenderSchedule& schedule() const { return schedule_; }
  const CameraSensor& sensor() const { return sensor_; }
  std::size_t size() const { return cfg_.n_envs; }
  std::size_t num_joints() const { return static_cast<std::size_t>(cfg_.physics.num_joints); }
  std::size_t proprio_dim() const { return splatgym::proprio_dim(cfg_.physics.num_joints); }

  const EnvBatchState& batch() const { return batch_; }
  const Command& command(std::size_t e) const { return commands_.at(e); }
  const RewardBreakdown& reward_breakdown(std::size_t e) const { return breakdown_.at(e); }
  EpisodeStatus last_status(std::size_t e) const { return last_status_.at(e); }
  bool last_fault(std::size_t e) const { return last_fault_.at(e) != 0; }
  std::int64_t episode_index(std::size_t e) const { return episode_.at(e); }

  // Contiguous output buffers.
  const RenderOutput& frames() const { return frames_; }
  std::span<const std::uint8_t> rgb() const { return frames_.rgb; }
  std::span<const float> depth() const { return frames_.depth; }
  std::span<const float> proprio() const { return proprio_; }
  std::span<const float> rewards() const { return rewards_; }
  std::span<const std::uint8_t> dones() const { return dones_; }
  /// Envs whose frame was re-rendered by the last step/reset.
  std::span<const std::uint8_t> rendered() const { return rendered_; }
  std::int64_t frame_step(std::size_t e) const { return frame_step_.at(e); }

  Observation observation(std::size_t e) const {
    const std::size_t d = proprio_dim();
    return {std::span<const float>(proprio_).subspan(e * d, d), frames_.rgb_frame(e), frame_step_[e]};
  }

  const EngineTimings& timings() const { return timings_; }
  const RenderStats& render_stats() const { return renderer_.stats(); }
  void reset_timings() {
    timings_ = {};
    renderer_.reset_stats();
  }

  /// Gait-controller targets applied from the next step on (one per env).
  void set_drive(std::span<const DriveCommand> drives) {
    if (drives.size() != size())
      throw ConfigError("set_drive: expected " + std::to_string(size()) + " entries, got " +
                        std::to_string(drives.size()));
    std::copy(drives.begin(), drives.end(), drives_.begin());
  }

  /// Re-seeds every env and starts new episodes; renders step 0 everywhere.
  void reset(std::optional<std::uint64_t> seed = std::nullopt) {
    if (seed) cfg_.seed = *seed;
    for (std::size_t e = 0; e < size(); ++e) {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                        static_cast<std::uint32_t>(e), 0x5eedu};
      rngs_[e].seed(seq);
      episode_[e] = 0;
      start_episode(e);
    }
    std::fill(rewards_.begin(), rewards_.end(), 0.0f);
    std::fill(dones_.begin(), dones_.end(), 0);
    std::fill(last_status_.begin(), last_status_.end(), EpisodeStatus::Running);
    std::fill(last_fault_.begin(), last_fault_.end(), 0);
    for (auto& b : breakdown_) b = {};
    std::fill(rendered_.begin(), rendered_.end(), 0);
    render_due();
    pack_all();
  }

  /// One control step for every env. `actions` is N x J row-major; it is
  /// checked before any state changes.
  void step(std::span<const float> actions) {
    const std::size_t j = num_joints();
    if (actions.size() != size() * j)
      throw ConfigError("step: expected actions of shape (" + std::to_string(size()) + ", " + std::to_string(j) +
                        "), got " + std::to_string(actions.size()) + " values");
    for (float a : actions)
      if (!std::isfinite(a)) throw ConfigError("step: actions must be finite");

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    for (std::size_t e = 0; e < size(); ++e) batch_.robots[e].drive = drives_[e];
    physics_.step(batch_, actions, cfg_.control_dt());
    auto t1 = clock::now();

    const double dt = cfg_.control_dt();
    for (std::size_t e = 0; e < size(); ++e) {
      const RobotState& s = batch_.robots[e];
      Command& cmd = commands_[e];
      cmd.remaining = cmd.deadline - static_cast<double>(batch_.steps[e]) * dt;
      last_fault_[e] = batch_.fault[e];
      RewardBreakdown& r = breakdown_[e];
      r = {};
      if (batch_.fault[e]) {
        last_status_[e] = EpisodeStatus::Terminated;
      } else {
        r = compute_general_rewards(s, cfg_.rewards);
        r.append(compute_task_rewards(s, cmd, cfg_.rewards));
        r.add("penalty_region", compute_penalty_region_reward(s, registry_.scene(batch_.scene[e])));
        last_status_[e] = check_termination(s, batch_.steps[e], registry_.scene(batch_.scene[e]).floor_height(),
                                            cfg_.termination, dt);
      }
      batch_.status[e] = last_status_[e];
      rewards_[e] = static_cast<float>(r.total);
      dones_[e] = last_status_[e] != EpisodeStatus::Running;
      if (dones_[e]) {
        ++episode_[e];
        start_episode(e);
      }
    }
    auto t2 = clock::now();

    std::fill(rendered_.begin(), rendered_.end(), 0);
    render_due();
    pack_all();
    auto t3 = clock::now();
    timings_.physics_s += std::chrono::duration<double>(t1 - t0).count();
    timings_.tasks_s += std::chrono::duration<double>(t2 - t1).count();
    timings_.render_s += std::chrono::duration<double>(t3 - t2).count();
  }

  /// World pose of env `e`'s camera.
  Pose camera_pose(std::size_t e) const {
    const RobotState& s = batch_.robots[e];
    return sensor_.world_pose(Pose{s.orientation, s.position});
  }

  /// Ground-truth occupancy and height labels around env `e`'s base.
  VoxelLabel labels(std::size_t e) const {
    const RobotState& s = batch_.robots[e];
    return voxelize_ground_truth(registry_.scene(batch_.scene[e]).mesh, s.position, yaw_of(s.orientation), cfg_.grid);
  }

 private:
  void start_episode(std::size_t e) {
    const GaussianSplatScene& scene = registry_.scene(batch_.scene[e]);
    const SpawnPose spawn = sample_spawn(scene, cfg_.commands, rngs_[e]);
    physics_.reset_env(batch_, e, spawn);
    commands_[e] = sample_command(cfg_.commands, spawn, rngs_[e]);
    drives_[e] = DriveCommand{};
  }

  void render_due() {
    std::vector<BlurRequest> requests;
    std::vector<std::size_t> envs;
    for (std::size_t e = 0; e < size(); ++e) {
      if (!should_render(schedule_, batch_.steps[e])) continue;
      const RobotState& s = batch_.robots[e];
      BlurRequest r;
      r.camera.env = e;
      r.camera.world_from_camera = camera_pose(e);
      r.camera.intrinsics = sensor_.intrinsics;
      const Vec3d lever = s.orientation * sensor_.mount.translation;
      r.linear_velocity = s.linear_velocity + s.angular_velocity.cross(lever);
      r.angular_velocity = s.angular_velocity;
      requests.push_back(r);
      envs.push_back(e);
    }
    if (requests.empty()) return;
    render_with_motion_blur(renderer_, registry_, requests, sensor_.shutter_time, sensor_.blur_samples,
                            sensor_.blur_angular, render_cfg_, staging_, blur_scratch_);
    for (std::size_t i = 0; i < envs.size(); ++i) {
      frames_.copy_frame_from(staging_, i, envs[i]);
      frame_step_[envs[i]] = batch_.steps[envs[i]];
      rendered_[envs[i]] = 1;
    }
    timings_.renders += envs.size();
  }

  void pack_all() {
    const std::size_t d = proprio_dim();
    for (std::size_t e = 0; e < size(); ++e)
      pack_proprio(batch_.robots[e], std::span<float>(proprio_).subspan(e * d, d));
  }

  EngineConfig cfg_;
  SceneRegistry registry_;
  RenderSchedule schedule_;
  CameraSensor sensor_;
  RenderConfig render_cfg_;
  Renderer renderer_;
  PhysicsWorld physics_;
  EnvBatchState batch_;

  std::vector<Command> commands_;
  std::vector<std::mt19937_64> rngs_;
  std::vector<DriveCommand> drives_;
  RenderOutput frames_;
  RenderOutput staging_;
  RenderOutput blur_scratch_;
  std::vector<std::int64_t> frame_step_;
  std::vector<std::uint8_t> rendered_;
  std::vector<float> proprio_;
  std::vector<float> rewards_;
  std::vector<std::uint8_t> dones_;
  std::vector<EpisodeStatus> last_status_;
  std::vector<std::uint8_t> last_fault_;
  std::vector<RewardBreakdown> breakdown_;
  std::vector<std::int64_t> episode_;
  EngineTimings timings_;
};

}  // namespace splatgym
