// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/registry.hpp"
#include "splatgym/core/parallel.hpp"
#include "splatgym/physics/robot.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace splatgym {

enum class EpisodeStatus : std::uint8_t { Running, Terminated, Truncated };

inline const char* to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Running: return "running";
    case EpisodeStatus::Terminated: return "terminated";
    case EpisodeStatus::Truncated: return "truncated";
  }
  return "unknown";
}

/// Per-environment state for N parallel environments. N is fixed at construction.
struct EnvBatchState {
  std::vector<RobotState> robots;
  std::vector<std::size_t> scene;
  std::vector<std::int64_t> steps;
  std::vector<EpisodeStatus> status;
  std::vector<std::uint8_t> fault;  // set with Terminated when the state went non-finite

  explicit EnvBatchState(std::size_t n = 0) : robots(n), scene(n, 0), steps(n, 0), status(n), fault(n, 0) {}
  std::size_t size() const { return robots.size(); }
};

/// Spawn location on the floor; the base is placed support_height above it.
struct SpawnPose {
  Vec3d point = Vec3d::Zero();
  double yaw = 0.0;
};

/// Deepest sphere/mesh contact, or none.
inline std::optional<Contact> query_contact(const CollisionMesh& mesh, const Vec3d& center, double radius) {
  return mesh.sphere_contact(center, radius);
}

/// Foot center positions from the base pose and the procedural gait.
inline std::array<Vec3d, kNumFeet> foot_positions(const PhysicsConfig& cfg, const RobotState& s) {
  const double yaw = yaw_of(s.orientation);
  const Eigen::Matrix3d ryaw = Eigen::AngleAxisd(yaw, Vec3d::UnitZ()).toRotationMatrix();
  const double speed = std::hypot(s.drive.vx, s.drive.vy) + 0.2 * std::abs(s.drive.yaw_rate);
  const double amp = cfg.gait_speed_ref > 0.0 ? std::min(1.0, speed / cfg.gait_speed_ref) : 0.0;
  std::array<Vec3d, kNumFeet> out;
  for (int f = 0; f < kNumFeet; ++f) {
    const double arg = 2.0 * kPi * (s.phase + 0.5 * f);
    const double lift = cfg.swing_height * amp * std::max(0.0, std::sin(arg));
    const double fore = cfg.stride * amp * std::cos(arg);
    const double side = f == 0 ? cfg.foot_lateral : -cfg.foot_lateral;
    out[static_cast<std::size_t>(f)] = s.position + ryaw * Vec3d(fore, side, -cfg.leg_length + lift);
  }
  return out;
}

/// Vectorized stepping of floating-base robots against per-scene meshes.
/// Environments never interact, so batch stepping equals stepping each alone.
class PhysicsWorld {
 public:
  PhysicsWorld(const SceneRegistry& registry, PhysicsConfig config, int workers = 1)
      : registry_(registry), cfg_(std::move(config)), pool_(workers) {
    cfg_.validate();
  }

  const PhysicsConfig& config() const { return cfg_; }
  const SceneRegistry& registry() const { return registry_; }

  EnvBatchState make_batch() const {
    EnvBatchState b(registry_.env_count());
    for (std::size_t e = 0; e < b.size(); ++e) {
      b.scene[e] = registry_.scene_index(e);
      b.robots[e] = make_rest_state(cfg_, Vec3d(0.0, 0.0, cfg_.support_height()), 0.0);
      b.robots[e].foot_pos = foot_positions(cfg_, b.robots[e]);
    }
    return b;
  }

  /// Advances every running environment by one control step. `actions` is
  /// N x J row-major joint-position offsets from the default pose.
  void step(EnvBatchState& batch, std::span<const float> actions, double dt_control) {
    const auto j = static_cast<std::size_t>(cfg_.num_joints);
    if (actions.size() != batch.size() * j)
      throw ConfigError("physics step: expected " + std::to_string(batch.size() * j) + " actions, got " +
                        std::to_string(actions.size()));
    for (float a : actions)
      if (!std::isfinite(a)) throw ConfigError("physics step: non-finite action");
    if (!(dt_control > 0.0)) throw ConfigError("physics step: dt must be positive");
    pool_.parallel_for(batch.size(), [&](std::size_t e) {
      if (batch.status[e] != EpisodeStatus::Running) return;
      step_env(batch.robots[e], actions.subspan(e * j, j), dt_control, registry_.scene(batch.scene[e]));
      ++batch.steps[e];
      if (!batch.robots[e].finite()) {
        batch.status[e] = EpisodeStatus::Terminated;
        batch.fault[e] = 1;
      }
    });
  }

  /// Single-environment step; the batch path calls exactly this.
  void step_env(RobotState& s, std::span<const float> action, double dt, const GaussianSplatScene& scene) const {
    // Joints: first-order exact-exponential tracking of q_hat + action.
    const double decay = std::exp(-dt / cfg_.joint_time_constant);
    s.target_prev = s.target;
    for (std::size_t i = 0; i < s.joint_pos.size(); ++i) {
      s.target[i] = s.default_pose[i] + static_cast<double>(action[i]);
      const double q_new = s.target[i] + (s.joint_pos[i] - s.target[i]) * decay;
      s.joint_vel[i] = (q_new - s.joint_pos[i]) / dt;
      s.joint_pos[i] = q_new;
    }

    const double h = dt / cfg_.substeps;
    for (int k = 0; k < cfg_.substeps; ++k) substep(s, h, scene);

    s.phase = std::fmod(s.phase + cfg_.gait_frequency * dt, 1.0);
    if (s.phase < 0.0) s.phase += 1.0;
    s.foot_pos = foot_positions(cfg_, s);
    s.tilt = tilt_angle(s.orientation);
  }

  /// Places env `index` at `spawn`, clearing its state and counters. Other
  /// environments are untouched.
  void reset_env(EnvBatchState& batch, std::size_t index, const SpawnPose& spawn) const {
    if (index >= batch.size()) throw ConfigError("reset_env: index out of range");
    const GaussianSplatScene& scene = registry_.scene(batch.scene[index]);
    bool inside = false;
    for (const auto& r : scene.spawn_regions) inside = inside || r.contains(spawn.point);
    if (!inside)
      throw ConfigError("reset_env: spawn point outside every spawn region of scene '" + scene.scene_id + "'");
    RobotState s = make_rest_state(cfg_, spawn.point + Vec3d(0.0, 0.0, cfg_.support_height()), spawn.yaw);
    s.foot_pos = foot_positions(cfg_, s);
    batch.robots[index] = std::move(s);
    batch.steps[index] = 0;
    batch.status[index] = EpisodeStatus::Running;
    batch.fault[index] = 0;
  }

 private:
  void substep(RobotState& s, double h, const GaussianSplatScene& scene) const {
    const CollisionMesh& mesh = scene.mesh;
    const double mu = scene.friction;
    const double k = cfg_.contact_stiffness;
    const double c = cfg_.contact_damping;

    Vec3d force(0.0, 0.0, -cfg_.mass * cfg_.gravity);
    Vec3d torque = Vec3d::Zero();

    const auto feet = foot_positions(cfg_, s);
    std::array<std::optional<Contact>, kNumFeet> contacts;
    int loaded = 0;
    for (int f = 0; f < kNumFeet; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      contacts[fi] = query_contact(mesh, feet[fi], cfg_.foot_radius);
      if (contacts[fi]) ++loaded;
    }

    // Gait controller: planar traction toward the drive target, shared by loaded feet.
    const double yaw = yaw_of(s.orientation);
    const Vec3d drive_world(std::cos(yaw) * s.drive.vx - std::sin(yaw) * s.drive.vy,
                            std::sin(yaw) * s.drive.vx + std::cos(yaw) * s.drive.vy, 0.0);
    Vec3d traction = cfg_.mass * cfg_.drive_gain * (drive_world - Vec3d(s.linear_velocity.x(), s.linear_velocity.y(), 0.0));
    if (loaded > 0) traction /= loaded;

    for (int f = 0; f < kNumFeet; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      s.foot_contact[fi] = false;
      s.foot_force[fi] = Vec3d::Zero();
      if (!contacts[fi]) continue;
      const Contact& ct = *contacts[fi];
      const Vec3d lever = ct.point - s.position;
      const Vec3d vc = s.linear_velocity + s.angular_velocity.cross(lever);
      const double fn = std::max(0.0, k * ct.depth - c * vc.dot(ct.normal));
      Vec3d ft = traction - traction.dot(ct.normal) * ct.normal;
      const double limit = mu * fn;
      const double ftn = ft.norm();
      if (ftn > limit) ft *= ftn > 0.0 ? limit / ftn : 0.0;
      const Vec3d fc = fn * ct.normal + ft;
      force += fc;
      torque += lever.cross(fc);
      // The stance foot holds heading: it cancels the yaw moment of its own traction.
      torque.z() -= lever.cross(ft).z();
      s.foot_contact[fi] = fn > 0.0;
      s.foot_force[fi] = s.foot_contact[fi] ? fc : Vec3d::Zero();
    }

    if (auto body = query_contact(mesh, s.position, cfg_.body_radius)) {
      const Vec3d lever = body->point - s.position;
      const Vec3d vc = s.linear_velocity + s.angular_velocity.cross(lever);
      const double vn = vc.dot(body->normal);
      const double fn = std::max(0.0, k * body->depth - c * vn);
      Vec3d ft = -c * (vc - vn * body->normal);
      const double limit = mu * fn;
      const double ftn = ft.norm();
      if (ftn > limit) ft *= ftn > 0.0 ? limit / ftn : 0.0;
      const Vec3d fc = fn * body->normal + ft;
      force += fc;
      torque += lever.cross(fc);
    }

    if (loaded > 0) {
      // Posture: rotate body up toward world up; yaw rate toward the drive target.
      const Vec3d up = s.orientation * Vec3d::UnitZ();
      const Vec3d axis = up.cross(Vec3d::UnitZ());
      const double sin_a = axis.norm();
      if (sin_a > 0.0) torque += cfg_.posture_kp * std::atan2(sin_a, up.z()) * (axis / sin_a);
      torque -= cfg_.posture_kd * Vec3d(s.angular_velocity.x(), s.angular_velocity.y(), 0.0);
      torque.z() += cfg_.inertia * cfg_.yaw_drive_gain * (s.drive.yaw_rate - s.angular_velocity.z());
    }

    // Semi-implicit Euler.
    s.linear_velocity += (force / cfg_.mass) * h;
    s.angular_velocity += (torque / cfg_.inertia) * h;
    s.position += s.linear_velocity * h;
    const Vec3d rotvec = s.angular_velocity * h;
    if (!rotvec.isZero(0.0)) s.orientation = (axis_angle(rotvec) * s.orientation).normalized();
  }

  const SceneRegistry& registry_;
  PhysicsConfig cfg_;
  mutable WorkerPool pool_;
};

}  // namespace splatgym
