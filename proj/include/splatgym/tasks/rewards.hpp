// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/math.hpp"
#include "splatgym/physics/robot.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace splatgym {

struct RewardConfig {
  // General terms.
  double ang_vel_xy = -0.2;
  double orientation = -0.5;
  double action_rate = -1.0;
  double pose_deviation = -0.5;
  double feet_distance = -10.0;
  double feet_phase = 5.0;
  double stumble = -3.0;
  // Velocity task.
  double lin_vel_track = 1.0;
  double ang_vel_track = 0.5;
  // Goal task.
  double pos_track = 10.0;
  double yaw_track = 10.0;

  double tracking_sigma2 = 0.25;
  double feet_distance_threshold = 0.1;  // m
  double phase_threshold = 0.25;
  double goal_window = 1.0;              // s; goal terms are active while remaining time is below this
};

enum class TaskMode : std::uint8_t { Velocity, Goal };

/// Per-env task command. Velocity targets are in the base yaw frame; goal
/// targets are world-frame.
struct Command {
  TaskMode mode = TaskMode::Velocity;
  Vec2d lin_vel = Vec2d::Zero();
  double yaw_rate = 0.0;
  Vec2d goal_xy = Vec2d::Zero();
  double goal_yaw = 0.0;
  double deadline = 10.0;   // s
  double remaining = 10.0;  // s, deadline - elapsed
};

struct RewardTerm {
  std::string_view name;
  double value = 0.0;  // weighted contribution
};

/// Ordered term list plus their sum.
struct RewardBreakdown {
  std::vector<RewardTerm> terms;
  double total = 0.0;

  void add(std::string_view name, double value) {
    terms.push_back({name, value});
    total += value;
  }
  void append(const RewardBreakdown& other) {
    for (const auto& t : other.terms) add(t.name, t.value);
  }
  double get(std::string_view name) const {
    for (const auto& t : terms)
      if (t.name == name) return t.value;
    return 0.0;
  }
};

/// Planar base velocity in the base yaw frame.
inline Vec2d yaw_frame_velocity(const RobotState& s) {
  const double yaw = yaw_of(s.orientation);
  const double c = std::cos(yaw), sn = std::sin(yaw);
  const Vec3d& v = s.linear_velocity;
  return {c * v.x() + sn * v.y(), -sn * v.x() + c * v.y()};
}

inline bool feet_stumbling(const Vec3d& force) {
  return force.head<2>().norm() >= 2.0 * std::abs(force.z());
}

inline RewardBreakdown compute_general_rewards(const RobotState& s, const RewardConfig& cfg) {
  RewardBreakdown r;
  const Vec3d w = s.body_angular_velocity();
  r.add("ang_vel_xy", cfg.ang_vel_xy * (w.x() * w.x() + w.y() * w.y()));
  r.add("orientation", cfg.orientation * s.tilt * s.tilt);

  double rate = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < s.target.size(); ++i) {
    const double d = s.target[i] - s.target_prev[i];
    rate += d * d;
  }
  for (std::size_t i = 0; i < s.joint_pos.size(); ++i) {
    const double d = s.joint_pos[i] - s.default_pose[i];
    dev += d * d;
  }
  r.add("action_rate", cfg.action_rate * rate);
  r.add("pose_deviation", cfg.pose_deviation * dev);

  const double feet_gap = (s.foot_pos[0].head<2>() - s.foot_pos[1].head<2>()).norm();
  r.add("feet_distance", feet_gap < cfg.feet_distance_threshold ? cfg.feet_distance : 0.0);

  int phase_hits = 0, stumbles = 0;
  for (int f = 0; f < kNumFeet; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    if (s.foot_contact[fi] && s.phase <= cfg.phase_threshold) ++phase_hits;
    // A foot without contact carries no force and cannot stumble.
    if (s.foot_contact[fi] && feet_stumbling(s.foot_force[fi])) ++stumbles;
  }
  r.add("feet_phase", cfg.feet_phase * phase_hits);
  r.add("stumble", cfg.stumble * stumbles);
  return r;
}

inline RewardBreakdown compute_velocity_rewards(const RobotState& s, const Command& cmd, const RewardConfig& cfg) {
  RewardBreakdown r;
  const double e_lin = (yaw_frame_velocity(s) - cmd.lin_vel).squaredNorm();
  const double e_ang = s.angular_velocity.z() - cmd.yaw_rate;
  r.add("lin_vel_track", cfg.lin_vel_track * std::exp(-e_lin / cfg.tracking_sigma2));
  r.add("ang_vel_track", cfg.ang_vel_track * std::exp(-(e_ang * e_ang) / cfg.tracking_sigma2));
  return r;
}

inline RewardBreakdown compute_goal_rewards(const RobotState& s, const Command& cmd, const RewardConfig& cfg) {
  RewardBreakdown r;
  if (!(cmd.remaining < cfg.goal_window)) {
    r.add("pos_track", 0.0);
    r.add("yaw_track", 0.0);
    return r;
  }
  const double pos_err = (s.position.head<2>() - cmd.goal_xy).norm();
  const double yaw_err = std::abs(wrap_angle(yaw_of(s.orientation) - cmd.goal_yaw));
  r.add("pos_track", cfg.pos_track * (1.0 - 0.5 * pos_err));
  r.add("yaw_track", cfg.yaw_track * (1.0 - 0.5 * yaw_err));
  return r;
}

inline RewardBreakdown compute_task_rewards(const RobotState& s, const Command& cmd, const RewardConfig& cfg) {
  return cmd.mode == TaskMode::Velocity ? compute_velocity_rewards(s, cmd, cfg) : compute_goal_rewards(s, cmd, cfg);
}

}  // namespace splatgym
