// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/splat.hpp"
#include "splatgym/core/math.hpp"

namespace splatgym {

/// Evaluates view-dependent color up to `degree` (clamped to the splat's own
/// degree) for a unit view direction from the camera toward the splat.
inline Vec3f eval_sh(const SplatPrimitive& s, int degree, const Vec3f& dir) {
  constexpr float C1 = 0.4886025119029199f;
  constexpr float C2[5] = {1.0925484305920792f, -1.0925484305920792f, 0.31539156525252005f, -1.0925484305920792f,
                           0.5462742152960396f};
  constexpr float C3[7] = {-0.5900435899266435f, 2.890611442640554f, -0.4570457994644658f, 0.3731763325901154f,
                           -0.4570457994644658f, 1.445305721320277f, -0.5900435899266435f};
  const int deg = std::min(degree, s.sh_degree);
  const int stride = s.sh_degree > 0 ? sh_rest_count(s.sh_degree) : 0;
  const float x = dir.x(), y = dir.y(), z = dir.z();
  Vec3f out;
  for (int c = 0; c < 3; ++c) {
    const float* r = s.sh_rest.data() + c * stride;  // r[k] is coefficient k+1
    float v = kShC0 * s.sh_dc[static_cast<std::size_t>(c)];
    if (deg > 0) v += -C1 * y * r[0] + C1 * z * r[1] - C1 * x * r[2];
    if (deg > 1) {
      const float xx = x * x, yy = y * y, zz = z * z;
      v += C2[0] * x * y * r[3] + C2[1] * y * z * r[4] + C2[2] * (2.0f * zz - xx - yy) * r[5] +
           C2[3] * x * z * r[6] + C2[4] * (xx - yy) * r[7];
      if (deg > 2) {
        v += C3[0] * y * (3.0f * xx - yy) * r[8] + C3[1] * x * y * z * r[9] +
             C3[2] * y * (4.0f * zz - xx - yy) * r[10] + C3[3] * z * (2.0f * zz - 3.0f * xx - 3.0f * yy) * r[11] +
             C3[4] * x * (4.0f * zz - xx - yy) * r[12] + C3[5] * z * (xx - yy) * r[13] +
             C3[6] * x * (xx - 3.0f * yy) * r[14];
      }
    }
    out[c] = std::clamp(v + 0.5f, 0.0f, 1.0f);
  }
  return out;
}

}  // namespace splatgym
