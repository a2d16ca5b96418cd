// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"
#include "splatgym/render/camera.hpp"
#include "splatgym/render/renderer.hpp"
#include "splatgym/sensor/schedule.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace splatgym {

struct CameraSensor {
  Intrinsics intrinsics;
  Pose mount;  // base_from_camera
  double frame_rate = 10.0;
  double shutter_time = 0.01;
  int blur_samples = 1;       // K; 1 disables blur
  bool blur_angular = true;   // include angular velocity in blur offsets
  std::int64_t last_render_step = -1;

  void validate(double control_rate) const {
    intrinsics.validate();
    if (!(frame_rate > 0.0) || frame_rate > control_rate)
      throw ConfigError("camera: frame rate must be in (0, control rate]");
    if (!(shutter_time >= 0.0) || shutter_time >= 1.0 / frame_rate)
      throw ConfigError("camera: shutter time must be in [0, 1/frame_rate)");
    if (blur_samples < 1) throw ConfigError("camera: blur sample count must be >= 1");
  }

  Pose world_pose(const Pose& base) const { return base.compose(mount); }
};

/// Shutter sample times, uniformly spanning [-shutter/2, +shutter/2].
inline std::vector<double> blur_sample_times(double shutter_time, int samples) {
  if (samples < 1) throw ConfigError("motion blur: sample count must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(samples), 0.0);
  if (samples == 1) return t;
  for (int i = 0; i < samples; ++i)
    t[static_cast<std::size_t>(i)] = -0.5 * shutter_time + shutter_time * i / (samples - 1);
  return t;
}

/// Camera pose advanced by `t` seconds of constant world-frame velocity.
inline Pose advance_pose(const Pose& pose, const Vec3d& linear_velocity, const Vec3d& angular_velocity, double t,
                         bool angular) {
  Pose p = pose;
  p.translation += linear_velocity * t;
  const Vec3d rotvec = angular_velocity * t;
  if (angular && !rotvec.isZero(0.0)) p.rotation = (axis_angle(rotvec) * pose.rotation).normalized();
  return p;
}

/// Index of the sample whose depth is reported (the middle one; lower middle for even K).
inline std::size_t blur_depth_sample(int samples) { return static_cast<std::size_t>((samples - 1) / 2); }

/// Per-camera motion inputs for a blurred render.
struct BlurRequest {
  CameraView camera;
  Vec3d linear_velocity = Vec3d::Zero();
  Vec3d angular_velocity = Vec3d::Zero();
};

/// Renders K shutter samples per request in one batch and averages their
/// linear color with weight 1/K (double accumulation, then quantization).
/// Depth and alpha come from the middle sample.
inline void render_with_motion_blur(Renderer& renderer, const SceneRegistry& registry,
                                    std::span<const BlurRequest> requests, double shutter_time, int samples,
                                    bool angular, const RenderConfig& config, RenderOutput& out,
                                    RenderOutput& scratch) {
  const auto times = blur_sample_times(shutter_time, samples);
  const auto k = static_cast<std::size_t>(samples);
  std::vector<CameraView> cams;
  cams.reserve(requests.size() * k);
  for (const auto& r : requests)
    for (double t : times) {
      CameraView c = r.camera;
      c.world_from_camera = advance_pose(r.camera.world_from_camera, r.linear_velocity, r.angular_velocity, t, angular);
      cams.push_back(c);
    }
  if (k == 1) {
    renderer.render_batch(registry, cams, config, out);
    return;
  }
  renderer.render_batch(registry, cams, config, scratch);
  out.resize(requests.size(), config.height, config.width);
  const std::size_t n = out.pixels() * 3;
  const std::size_t mid = blur_depth_sample(samples);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    float* dst = out.frame(i).linear_rgb;
    for (std::size_t p = 0; p < n; ++p) {
      double sum = 0.0;
      for (std::size_t s = 0; s < k; ++s) sum += scratch.linear_rgb[(i * k + s) * n + p];
      dst[p] = static_cast<float>(sum / static_cast<double>(k));
    }
    const std::size_t px = out.pixels();
    std::copy_n(scratch.depth.data() + (i * k + mid) * px, px, out.depth.data() + i * px);
    std::copy_n(scratch.accum_alpha.data() + (i * k + mid) * px, px, out.accum_alpha.data() + i * px);
    out.quantize(i);
  }
}

/// Single-camera convenience form.
inline RenderOutput render_with_motion_blur(Renderer& renderer, const SceneRegistry& registry,
                                            const CameraView& camera, const Vec3d& linear_velocity,
                                            const Vec3d& angular_velocity, double shutter_time, int samples,
                                            const RenderConfig& config, bool angular = true) {
  RenderOutput out, scratch;
  BlurRequest req{camera, linear_velocity, angular_velocity};
  render_with_motion_blur(renderer, registry, std::span(&req, 1), shutter_time, samples, angular, config, out, scratch);
  return out;
}

}  // namespace splatgym
