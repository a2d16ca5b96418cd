// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace splatgym {

inline constexpr int kNumFeet = 2;  // 0 = left, 1 = right

/// Floating-base robot with procedural feet. Contact uses spring-damper
/// penalty forces with Coulomb-clamped tangential forces.
struct PhysicsConfig {
  double gravity = kGravity;
  int substeps = 4;
  double contact_stiffness = 1.0e5;  // N/m per contact
  double contact_damping = 1.0e3;    // N s/m per contact
  double gait_frequency = 1.5;       // Hz
  double joint_time_constant = 0.05; // s

  double mass = 12.0;                // kg
  double inertia = 0.3;              // kg m^2, isotropic
  double body_radius = 0.15;
  double foot_radius = 0.02;
  double leg_length = 0.28;          // hip height above foot center at rest
  double foot_lateral = 0.12;        // half stance width
  double swing_height = 0.06;
  double stride = 0.08;              // fore-aft foot excursion amplitude
  double gait_speed_ref = 0.5;       // m/s at which the gait reaches full amplitude

  double drive_gain = 4.0;           // 1/s, planar velocity tracking of the gait controller
  double yaw_drive_gain = 4.0;       // 1/s
  double posture_kp = 300.0;         // N m / rad
  double posture_kd = 30.0;          // N m s / rad

  int num_joints = 12;
  std::vector<double> default_pose = {0.0, 0.8, -1.5, 0.0, 0.8, -1.5, 0.0, 0.8, -1.5, 0.0, 0.8, -1.5};

  void validate() const {
    if (substeps < 1) throw ConfigError("physics: substeps must be >= 1");
    if (num_joints < 0) throw ConfigError("physics: num_joints must be >= 0");
    if (static_cast<int>(default_pose.size()) != num_joints)
      throw ConfigError("physics: default_pose length must equal num_joints");
    if (!(mass > 0.0 && inertia > 0.0)) throw ConfigError("physics: mass and inertia must be positive");
    if (!(joint_time_constant > 0.0)) throw ConfigError("physics: joint time constant must be positive");
    if (!(contact_stiffness > 0.0)) throw ConfigError("physics: contact stiffness must be positive");
  }

  /// Base height above the floor at static equilibrium with both feet loaded.
  double support_height() const {
    return leg_length + foot_radius - mass * gravity / (kNumFeet * contact_stiffness);
  }
};

/// Planar velocity target for the gait controller, in the base yaw frame.
struct DriveCommand {
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
};

struct RobotState {
  Vec3d position = Vec3d::Zero();
  Quatd orientation = Quatd::Identity();
  Vec3d linear_velocity = Vec3d::Zero();
  Vec3d angular_velocity = Vec3d::Zero();  // world frame

  std::vector<double> joint_pos;
  std::vector<double> joint_vel;
  std::vector<double> default_pose;
  std::vector<double> target_prev;
  std::vector<double> target;

  std::array<Vec3d, kNumFeet> foot_pos{Vec3d::Zero(), Vec3d::Zero()};
  std::array<bool, kNumFeet> foot_contact{false, false};
  std::array<Vec3d, kNumFeet> foot_force{Vec3d::Zero(), Vec3d::Zero()};

  double phase = 0.0;  // gait phase in [0, 1)
  double tilt = 0.0;   // angle between body up and world up, rad
  DriveCommand drive;

  /// Angular velocity expressed in the body frame.
  Vec3d body_angular_velocity() const { return orientation.conjugate() * angular_velocity; }

  bool finite() const {
    auto ok = [](const auto& v) { return v.allFinite(); };
    if (!ok(position) || !ok(linear_velocity) || !ok(angular_velocity) || !ok(orientation.coeffs())) return false;
    for (const auto* vec : {&joint_pos, &joint_vel, &target, &target_prev})
      for (double x : *vec)
        if (!std::isfinite(x)) return false;
    for (const auto& f : foot_pos)
      if (!ok(f)) return false;
    return std::isfinite(phase);
  }
};

/// Nominal state at rest: joints at the default pose, feet under the hips.
inline RobotState make_rest_state(const PhysicsConfig& cfg, const Vec3d& base_position, double yaw) {
  RobotState s;
  s.position = base_position;
  s.orientation = Quatd(Eigen::AngleAxisd(yaw, Vec3d::UnitZ()));
  s.joint_pos = cfg.default_pose;
  s.joint_vel.assign(static_cast<std::size_t>(cfg.num_joints), 0.0);
  s.default_pose = cfg.default_pose;
  s.target_prev = cfg.default_pose;
  s.target = cfg.default_pose;
  return s;
}

}  // namespace splatgym
