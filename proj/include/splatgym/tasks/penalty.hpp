// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/scene.hpp"
#include "splatgym/physics/robot.hpp"

#include <vector>

namespace splatgym {

/// Sum of region weights over every region containing the base (x, y).
inline double compute_penalty_region_reward(const RobotState& s, const GaussianSplatScene& scene) {
  double r = 0.0;
  const Vec2d p = s.position.head<2>();
  for (const auto& region : scene.penalty_regions)
    if (point_in_convex_polygon(p, region.polygon)) r += region.weight;
  return r;
}

}  // namespace splatgym
