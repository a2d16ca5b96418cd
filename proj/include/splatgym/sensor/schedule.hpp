// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"

#include <cstdint>
#include <string>

namespace splatgym {

/// Camera updates happen on every `render_every`-th control step; between
/// them observers see the last rendered frame.
struct RenderSchedule {
  int control_rate_hz = 50;
  int camera_rate_hz = 10;
  int render_every = 5;

  static RenderSchedule make(int control_rate_hz, int camera_rate_hz) {
    if (control_rate_hz <= 0 || camera_rate_hz <= 0) throw ConfigError("schedule: rates must be positive");
    if (camera_rate_hz > control_rate_hz)
      throw ConfigError("schedule: camera rate " + std::to_string(camera_rate_hz) + " Hz exceeds control rate " +
                        std::to_string(control_rate_hz) + " Hz");
    if (control_rate_hz % camera_rate_hz != 0)
      throw ConfigError("schedule: control rate " + std::to_string(control_rate_hz) +
                        " Hz is not divisible by camera rate " + std::to_string(camera_rate_hz) + " Hz");
    return RenderSchedule{control_rate_hz, camera_rate_hz, control_rate_hz / camera_rate_hz};
  }

  /// Schedule expressed directly as a render interval in control steps.
  static RenderSchedule every(int control_rate_hz, int render_every) {
    if (render_every < 1) throw ConfigError("schedule: render_every must be >= 1");
    if (control_rate_hz % render_every != 0)
      throw ConfigError("schedule: render_every must divide the control rate");
    return make(control_rate_hz, control_rate_hz / render_every);
  }

  double control_dt() const { return 1.0 / control_rate_hz; }
};

inline bool should_render(const RenderSchedule& schedule, std::int64_t step_index) {
  return step_index % schedule.render_every == 0;
}

/// Control step at which the frame visible at `step_index` was rendered.
inline std::int64_t held_frame_step(const RenderSchedule& schedule, std::int64_t step_index) {
  return step_index - step_index % schedule.render_every;
}

}  // namespace splatgym
