// SPDX-License-Identifier: Apache-2.0
#pragma once

// Front-to-back alpha compositing of one screen tile.

#include "splatgym/render/projection.hpp"
#include "splatgym/render/render_output.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace splatgym {

struct TileRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open pixel bounds
};

namespace detail {

struct TileGaussian {
  float mx, my, ca, cb, cc, opacity, depth, r, g, b;
  float skip_below;  // power below this is certainly under the alpha cutoff
};

// log(kAlphaMin / opacity) less a margin far above float rounding, so the
// shortcut only skips pairs the exact test would also skip.
inline float skip_threshold(float opacity) { return std::log(kAlphaMin / opacity) - 1e-3f; }

}  // namespace detail

/// Composites `list` (indices into `projected`, front to back) over every pixel
/// of `rect`. With `WithDepth == false` the depth plane is left untouched and
/// the color path is bit-identical to the depth-enabled one.
template <bool WithDepth>
void composite_tile(std::span<const ProjectedGaussian> projected, std::span<const std::uint32_t> list,
                    const TileRect& rect, const Vec3f& background, FrameView out) {
  thread_local std::vector<detail::TileGaussian> local;
  local.resize(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const ProjectedGaussian& g = projected[list[i]];
    local[i] = {g.mean2d.x(), g.mean2d.y(), g.conic[0], g.conic[1], g.conic[2], g.opacity,
                g.view_depth, g.color.x(), g.color.y(), g.color.z(), detail::skip_threshold(g.opacity)};
  }
  const detail::TileGaussian* gs = local.data();
  const std::size_t n = local.size();

  for (int py = rect.y0; py < rect.y1; ++py) {
    for (int px = rect.x0; px < rect.x1; ++px) {
      const float fx = static_cast<float>(px);
      const float fy = static_cast<float>(py);
      float t = 1.0f;
      float cr = 0.0f, cg = 0.0f, cb = 0.0f, d = 0.0f;
      for (std::size_t i = 0; i < n; ++i) {
        const detail::TileGaussian& g = gs[i];
        const float dx = fx - g.mx;
        const float dy = fy - g.my;
        const float power = -0.5f * (g.ca * dx * dx + g.cc * dy * dy) - g.cb * dx * dy;
        if (power > 0.0f || power < g.skip_below) continue;
        const float alpha = std::min(kAlphaMax, g.opacity * std::exp(power));
        if (alpha < kAlphaMin) continue;
        const float w = alpha * t;
        cr += w * g.r;
        cg += w * g.g;
        cb += w * g.b;
        if constexpr (WithDepth) d += w * g.depth;
        t *= 1.0f - alpha;
        if (t < kTransmittanceMin) break;
      }
      const std::size_t pix = static_cast<std::size_t>(py) * static_cast<std::size_t>(out.width) + static_cast<std::size_t>(px);
      const float a = 1.0f - t;
      out.linear_rgb[pix * 3 + 0] = cr + t * background.x();
      out.linear_rgb[pix * 3 + 1] = cg + t * background.y();
      out.linear_rgb[pix * 3 + 2] = cb + t * background.z();
      out.alpha[pix] = a;
      if constexpr (WithDepth) out.depth[pix] = a > 0.0f ? d / a : 0.0f;
    }
  }
}

inline void composite_tile(std::span<const ProjectedGaussian> projected, std::span<const std::uint32_t> list,
                           const TileRect& rect, const Vec3f& background, FrameView out, bool with_depth) {
  if (with_depth)
    composite_tile<true>(projected, list, rect, background, out);
  else
    composite_tile<false>(projected, list, rect, background, out);
}

}  // namespace splatgym
