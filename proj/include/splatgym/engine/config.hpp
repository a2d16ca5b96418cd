// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"
#include "splatgym/physics/robot.hpp"
#include "splatgym/render/renderer.hpp"
#include "splatgym/sensor/camera_sensor.hpp"
#include "splatgym/tasks/commands.hpp"
#include "splatgym/tasks/rewards.hpp"
#include "splatgym/tasks/termination.hpp"
#include "splatgym/tasks/voxel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace splatgym {

struct CameraConfig {
  int width = 64;
  int height = 48;
  double hfov_deg = 90.0;
  double rate_hz = 10.0;
  double shutter_s = 0.01;
  int blur_k = 1;
  bool blur_angular = true;
  Vec3d mount_translation = Vec3d(0.2, 0.0, 0.05);  // base frame
  double mount_pitch_deg = 15.0;                    // downward tilt
  Vec3f background = Vec3f::Zero();
  int sh_degree = 0;
  bool with_depth = true;
  float near_plane = 0.01f;
};

struct EngineConfig {
  std::size_t n_envs = 1;
  int control_rate_hz = 50;
  int render_every = 5;
  int workers = default_worker_count();
  std::uint64_t seed = 0;
  CameraConfig camera;
  PhysicsConfig physics;
  RewardConfig rewards;
  TerminationConfig termination;
  CommandConfig commands;
  GridConfig grid;

  double control_dt() const { return 1.0 / control_rate_hz; }
  RenderSchedule schedule() const { return RenderSchedule::every(control_rate_hz, render_every); }

  void validate() const {
    if (n_envs == 0) throw ConfigError("engine: n_envs must be >= 1");
    if (workers < 1) throw ConfigError("engine: workers must be >= 1");
    (void)schedule();
    physics.validate();
    grid.validate();
    camera_sensor().validate(control_rate_hz);
  }

  RenderConfig render_config() const {
    RenderConfig r;
    r.width = camera.width;
    r.height = camera.height;
    r.near_plane = camera.near_plane;
    r.background = camera.background;
    r.sh_degree = camera.sh_degree;
    r.with_depth = camera.with_depth;
    return r;
  }

  CameraSensor camera_sensor() const {
    CameraSensor s;
    s.intrinsics = Intrinsics::from_fov(camera.width, camera.height, camera.hfov_deg * kPi / 180.0);
    // Camera axes in the base frame: +Z forward along base +X, +X right, +Y down.
    Mat3d r;
    r.col(0) = Vec3d(0.0, -1.0, 0.0);
    r.col(1) = Vec3d(0.0, 0.0, -1.0);
    r.col(2) = Vec3d(1.0, 0.0, 0.0);
    const Mat3d pitch = Eigen::AngleAxisd(camera.mount_pitch_deg * kPi / 180.0, Vec3d::UnitY()).toRotationMatrix();
    s.mount = Pose{Quatd(pitch * r).normalized(), camera.mount_translation};
    s.frame_rate = static_cast<double>(control_rate_hz) / render_every;
    s.shutter_time = camera.shutter_s;
    s.blur_samples = camera.blur_k;
    s.blur_angular = camera.blur_angular;
    return s;
  }
};

namespace detail {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: field '") + key + "': " + e.what());
  }
}

inline void read_vec3(const nlohmann::json& j, const char* key, Vec3d& dst) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(std::string("config: field '") + key + "' must be [x, y, z]");
  dst = Vec3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

inline void read_range(const nlohmann::json& j, const char* key, Range& dst) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_number()) {
    dst = {v.get<double>(), v.get<double>()};
    return;
  }
  if (!v.is_array() || v.size() != 2 || v[0].get<double>() > v[1].get<double>())
    throw ConfigError(std::string("config: field '") + key + "' must be a number or [lo, hi] with lo <= hi");
  dst = {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

/// Overlays the fields present in `j` on top of the defaults in `cfg`.
inline EngineConfig parse_engine_config(const nlohmann::json& j, EngineConfig cfg = {}) {
  using detail::read;
  read(j, "n_envs", cfg.n_envs);
  read(j, "control_rate_hz", cfg.control_rate_hz);
  read(j, "render_every", cfg.render_every);
  read(j, "workers", cfg.workers);
  read(j, "seed", cfg.seed);

  if (j.contains("camera")) {
    const auto& c = j["camera"];
    read(c, "width", cfg.camera.width);
    read(c, "height", cfg.camera.height);
    read(c, "hfov_deg", cfg.camera.hfov_deg);
    read(c, "shutter_s", cfg.camera.shutter_s);
    read(c, "blur_k", cfg.camera.blur_k);
    read(c, "blur_angular", cfg.camera.blur_angular);
    detail::read_vec3(c, "mount_translation", cfg.camera.mount_translation);
    read(c, "mount_pitch_deg", cfg.camera.mount_pitch_deg);
    Vec3d bg = cfg.camera.background.cast<double>();
    detail::read_vec3(c, "background", bg);
    cfg.camera.background = bg.cast<float>();
    read(c, "sh_degree", cfg.camera.sh_degree);
    read(c, "with_depth", cfg.camera.with_depth);
    read(c, "near_plane", cfg.camera.near_plane);
  }
  if (j.contains("physics")) {
    const auto& p = j["physics"];
    auto& d = cfg.physics;
    read(p, "gravity", d.gravity);
    read(p, "substeps", d.substeps);
    read(p, "contact_stiffness", d.contact_stiffness);
    read(p, "contact_damping", d.contact_damping);
    read(p, "gait_frequency", d.gait_frequency);
    read(p, "joint_time_constant", d.joint_time_constant);
    read(p, "mass", d.mass);
    read(p, "inertia", d.inertia);
    read(p, "body_radius", d.body_radius);
    read(p, "foot_radius", d.foot_radius);
    read(p, "leg_length", d.leg_length);
    read(p, "foot_lateral", d.foot_lateral);
    read(p, "num_joints", d.num_joints);
    read(p, "default_pose", d.default_pose);
  }
  if (j.contains("rewards")) {
    const auto& r = j["rewards"];
    auto& d = cfg.rewards;
    read(r, "ang_vel_xy", d.ang_vel_xy);
    read(r, "orientation", d.orientation);
    read(r, "action_rate", d.action_rate);
    read(r, "pose_deviation", d.pose_deviation);
    read(r, "feet_distance", d.feet_distance);
    read(r, "feet_phase", d.feet_phase);
    read(r, "stumble", d.stumble);
    read(r, "lin_vel_track", d.lin_vel_track);
    read(r, "ang_vel_track", d.ang_vel_track);
    read(r, "pos_track", d.pos_track);
    read(r, "yaw_track", d.yaw_track);
    read(r, "tracking_sigma2", d.tracking_sigma2);
  }
  if (j.contains("termination")) {
    const auto& t = j["termination"];
    read(t, "max_tilt", cfg.termination.max_tilt);
    read(t, "escape_depth", cfg.termination.escape_depth);
    read(t, "episode_length_s", cfg.termination.episode_length_s);
  }
  if (j.contains("commands")) {
    const auto& c = j["commands"];
    auto& d = cfg.commands;
    if (c.contains("mode")) {
      const auto mode = c["mode"].get<std::string>();
      if (mode == "velocity") d.mode = TaskMode::Velocity;
      else if (mode == "goal") d.mode = TaskMode::Goal;
      else throw ConfigError("config: commands.mode must be 'velocity' or 'goal', got '" + mode + "'");
    }
    detail::read_range(c, "vx", d.vx);
    detail::read_range(c, "vy", d.vy);
    detail::read_range(c, "yaw_rate", d.yaw_rate);
    detail::read_range(c, "goal_distance", d.goal_distance);
    detail::read_range(c, "goal_bearing", d.goal_bearing);
    detail::read_range(c, "goal_yaw", d.goal_yaw);
    read(c, "goal_deadline", d.goal_deadline);
    detail::read_range(c, "spawn_yaw", d.spawn_yaw);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    detail::read_vec3(g, "min", cfg.grid.min);
    detail::read_vec3(g, "extent", cfg.grid.extent);
    read(g, "cell", cfg.grid.cell);
    read(g, "no_hit_height", cfg.grid.no_hit_height);
  }
  cfg.validate();
  return cfg;
}

inline EngineConfig load_engine_config(const std::filesystem::path& path, EngineConfig defaults = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  try {
    return parse_engine_config(nlohmann::json::parse(in), std::move(defaults));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("config '" + path.string() + "': " + e.what());
  }
}

}  // namespace splatgym
