// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/physics/world.hpp"

#include <cmath>
#include <cstdint>

namespace splatgym {

struct TerminationConfig {
  double max_tilt = 1.0;           // rad
  double escape_depth = 1.0;       // m below the scene floor
  double episode_length_s = 20.0;

  std::int64_t episode_steps(double control_dt) const {
    return static_cast<std::int64_t>(std::llround(episode_length_s / control_dt));
  }
};

/// Falls and escapes terminate; reaching the episode length truncates.
/// Termination wins when both apply.
inline EpisodeStatus check_termination(const RobotState& s, std::int64_t step, double floor_height,
                                       const TerminationConfig& cfg, double control_dt) {
  if (s.tilt > cfg.max_tilt || s.position.z() < floor_height - cfg.escape_depth) return EpisodeStatus::Terminated;
  if (step >= cfg.episode_steps(control_dt)) return EpisodeStatus::Truncated;
  return EpisodeStatus::Running;
}

}  // namespace splatgym
