// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <cstddef>

namespace splatgym {

/// Pinhole intrinsics in pixels. Pixel (i, j) is sampled at coordinates (i, j).
struct Intrinsics {
  float fx = 100.0f;
  float fy = 100.0f;
  float cx = 32.0f;
  float cy = 32.0f;
  int width = 64;
  int height = 64;

  void validate() const {
    if (!(fx > 0.0f && fy > 0.0f)) throw ConfigError("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("intrinsics: image size must be positive");
  }

  /// Intrinsics for a horizontal field of view centered on the image.
  static Intrinsics from_fov(int width, int height, double hfov_rad) {
    Intrinsics k;
    k.width = width;
    k.height = height;
    k.fx = static_cast<float>(0.5 * width / std::tan(0.5 * hfov_rad));
    k.fy = k.fx;
    k.cx = 0.5f * static_cast<float>(width - 1);
    k.cy = 0.5f * static_cast<float>(height - 1);
    return k;
  }
};

/// Camera frame convention: +X right, +Y down, +Z forward (optical axis).
struct CameraView {
  std::size_t env = 0;
  Pose world_from_camera;
  Intrinsics intrinsics;
};

/// World->camera rigid transform in single precision, as the projector consumes it.
struct ViewTransform {
  Mat3f rotation;
  Vec3f translation;
  Vec3f camera_center;

  static ViewTransform from(const Pose& world_from_camera) {
    Pose cw = world_from_camera.inverse();
    ViewTransform v;
    v.rotation = cw.rotation.toRotationMatrix().cast<float>();
    v.translation = cw.translation.cast<float>();
    v.camera_center = world_from_camera.translation.cast<float>();
    return v;
  }
};

/// Camera at `eye` looking at `target` with world +Z as the up hint.
inline Pose look_at(const Vec3d& eye, const Vec3d& target, const Vec3d& up = Vec3d::UnitZ()) {
  Vec3d z = (target - eye).normalized();
  Vec3d x = z.cross(up);
  if (x.squaredNorm() < 1e-12) x = z.cross(Vec3d::UnitY());
  x.normalize();
  Vec3d y = z.cross(x);
  Mat3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose{Quatd(r).normalized(), eye};
}

}  // namespace splatgym
