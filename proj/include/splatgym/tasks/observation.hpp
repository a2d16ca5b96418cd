// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/physics/robot.hpp"
#include "splatgym/render/render_output.hpp"
#include "splatgym/sensor/schedule.hpp"

#include <cstdint>
#include <span>

namespace splatgym {

/// Proprioceptive layout: [omega_b (3), alpha (1), q (J), qdot (J), phi (1)].
/// Bump the version whenever the order or width changes.
inline constexpr int kObservationLayoutVersion = 1;

inline std::size_t proprio_dim(int num_joints) { return 5 + 2 * static_cast<std::size_t>(num_joints); }

/// Writes the proprioceptive fields of `s` into `out` (length proprio_dim).
inline void pack_proprio(const RobotState& s, std::span<float> out) {
  const Vec3d w = s.body_angular_velocity();
  std::size_t k = 0;
  out[k++] = static_cast<float>(w.x());
  out[k++] = static_cast<float>(w.y());
  out[k++] = static_cast<float>(w.z());
  out[k++] = static_cast<float>(s.tilt);
  for (double q : s.joint_pos) out[k++] = static_cast<float>(q);
  for (double qd : s.joint_vel) out[k++] = static_cast<float>(qd);
  out[k++] = static_cast<float>(s.phase);
}

/// One env's observation. `image` views the sensor's held frame (no copy).
struct Observation {
  std::span<const float> proprio;
  std::span<const std::uint8_t> image;  // H x W x 3
  std::int64_t frame_step = 0;          // episode step at which the image was rendered
};

/// Packs the state and references the most recent frame under `schedule`.
/// `frames` holds one frame per env, rendered at `frame_step`.
inline Observation build_observation(const RobotState& s, const RenderOutput& frames, std::size_t env,
                                     const RenderSchedule& schedule, std::int64_t step, std::span<float> proprio) {
  pack_proprio(s, proprio);
  return {proprio, frames.rgb_frame(env), held_frame_step(schedule, step)};
}

}  // namespace splatgym
