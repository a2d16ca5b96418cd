// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force per-pixel renderer used as a verification oracle: no tiling, no
// footprint culling, no early termination, double-precision accumulation.
// Cost is O(pixels * splats).

#include "splatgym/assets/scene.hpp"
#include "splatgym/render/projection.hpp"
#include "splatgym/render/render_output.hpp"
#include "splatgym/render/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace splatgym {

inline RenderOutput render_reference(const GaussianSplatScene& scene, const CameraView& camera,
                                     const RenderConfig& config) {
  const Intrinsics& k = camera.intrinsics;
  k.validate();
  RenderOutput out;
  out.resize(1, k.height, k.width);
  const ViewTransform view = ViewTransform::from(camera.world_from_camera);
  const PackedSplats packed = [&] {
    PackedSplats p = PackedSplats::from(scene.splats);
    p.source = std::shared_ptr<const std::vector<SplatPrimitive>>(std::shared_ptr<const void>(), &scene.splats);
    return p;
  }();

  std::vector<ProjectedGaussian> gs;
  for (std::size_t i = 0; i < packed.size(); ++i) {
    const Vec3f color = splat_color(packed, i, config.sh_degree, view.camera_center);
    auto g = project_unclipped(packed.position[i], packed.covariance[i], color, packed.opacity[i], view, k,
                               config.near_plane);
    if (!g) continue;
    g->index = static_cast<std::uint32_t>(i);
    gs.push_back(*g);
  }
  std::stable_sort(gs.begin(), gs.end(),
                   [](const ProjectedGaussian& a, const ProjectedGaussian& b) { return a.view_depth < b.view_depth; });

  FrameView f = out.frame(0);
  const double bg[3] = {config.background.x(), config.background.y(), config.background.z()};
  for (int py = 0; py < k.height; ++py) {
    for (int px = 0; px < k.width; ++px) {
      double t = 1.0, c[3] = {0.0, 0.0, 0.0}, d = 0.0;
      for (const auto& g : gs) {
        const double dx = px - static_cast<double>(g.mean2d.x());
        const double dy = py - static_cast<double>(g.mean2d.y());
        const double power = -0.5 * (static_cast<double>(g.conic[0]) * dx * dx + static_cast<double>(g.conic[2]) * dy * dy) -
                             static_cast<double>(g.conic[1]) * dx * dy;
        if (power > 0.0) continue;
        const double alpha = std::min(static_cast<double>(kAlphaMax), g.opacity * std::exp(power));
        if (alpha < static_cast<double>(kAlphaMin)) continue;
        const double w = alpha * t;
        for (int ch = 0; ch < 3; ++ch) c[ch] += w * g.color[ch];
        d += w * g.view_depth;
        t *= 1.0 - alpha;
      }
      const std::size_t pix = static_cast<std::size_t>(py) * static_cast<std::size_t>(k.width) + static_cast<std::size_t>(px);
      const double a = 1.0 - t;
      for (int ch = 0; ch < 3; ++ch) f.linear_rgb[pix * 3 + static_cast<std::size_t>(ch)] = static_cast<float>(c[ch] + t * bg[ch]);
      f.alpha[pix] = static_cast<float>(a);
      f.depth[pix] = a > 0.0 ? static_cast<float>(d / a) : 0.0f;
    }
  }
  out.quantize(0);
  return out;
}

}  // namespace splatgym
