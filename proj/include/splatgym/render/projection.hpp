// SPDX-License-Identifier: Apache-2.0
#pragma once

// EWA projection of 3D gaussians to screen-space 2D gaussians.

#include "splatgym/assets/splat.hpp"
#include "splatgym/render/camera.hpp"
#include "splatgym/render/sh.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace splatgym {

inline constexpr int kTileSize = 16;
inline constexpr float kCovarianceRegularizer = 0.3f;  // px^2 added to the 2D covariance diagonal
inline constexpr float kAlphaMax = 0.99f;
inline constexpr float kAlphaMin = 1.0f / 255.0f;
inline constexpr float kTransmittanceMin = 1e-6f;  // truncation error per pixel is below this
inline constexpr float kJacobianClamp = 1.3f;

/// Symmetric 3x3 covariance stored as (xx, xy, xz, yy, yz, zz).
using Cov3 = std::array<float, 6>;

/// Sigma = R diag(s^2) R^T.
inline Cov3 covariance_3d(const Quatf& rotation, const Vec3f& scale) {
  Mat3f r = rotation.toRotationMatrix();
  Mat3f m = r * scale.asDiagonal();
  Mat3f s = m * m.transpose();
  return {s(0, 0), s(0, 1), s(0, 2), s(1, 1), s(1, 2), s(2, 2)};
}

/// Per-scene render-ready splat data, derived once from the immutable scene.
struct PackedSplats {
  std::vector<Vec3f> position;
  std::vector<Cov3> covariance;
  std::vector<Vec3f> color;  // DC color
  std::vector<float> opacity;
  std::shared_ptr<const std::vector<SplatPrimitive>> source;  // for SH > 0

  std::size_t size() const { return position.size(); }

  static PackedSplats from(const std::vector<SplatPrimitive>& splats) {
    PackedSplats p;
    p.position.reserve(splats.size());
    p.covariance.reserve(splats.size());
    p.color.reserve(splats.size());
    p.opacity.reserve(splats.size());
    for (const auto& s : splats) {
      p.position.push_back(s.position);
      p.covariance.push_back(covariance_3d(s.rotation, s.scale));
      p.color.push_back(s.base_color());
      p.opacity.push_back(s.opacity);
    }
    return p;
  }
};

/// Screen-space gaussian. `tile_*` is the half-open tile rectangle covered by
/// the footprint.
struct ProjectedGaussian {
  Vec2f mean2d;
  std::array<float, 3> cov2d;    // (xx, xy, yy), regularized, px^2
  std::array<float, 3> conic;    // inverse of cov2d, (xx, xy, yy)
  float view_depth = 0.0f;
  Vec3f color;
  float opacity = 0.0f;
  float radius = 0.0f;           // footprint half-width in pixels
  std::int32_t tile_min_x = 0, tile_min_y = 0, tile_max_x = 0, tile_max_y = 0;
  std::uint32_t index = 0;       // source splat index

  bool covers_tile(int tx, int ty) const {
    return tx >= tile_min_x && tx < tile_max_x && ty >= tile_min_y && ty < tile_max_y;
  }
};

/// Mahalanobis radius (in sigmas) beyond which opacity * g < 1/255; never
/// less than 3 so the footprint always covers the 3-sigma ellipse.
inline float support_sigmas(float opacity) {
  float o = std::min(opacity, kAlphaMax);
  float s = 3.0f;
  if (o * 255.0f > 1.0f) s = std::max(s, std::sqrt(2.0f * std::log(255.0f * o)));
  return s;
}

/// Projects mean and covariance without any culling other than the near plane.
/// Footprint fields are filled but not clipped to the image.
inline std::optional<ProjectedGaussian> project_unclipped(const Vec3f& position, const Cov3& cov, const Vec3f& color,
                                                          float opacity, const ViewTransform& view,
                                                          const Intrinsics& k, float near_plane) {
  const Vec3f t = view.rotation * position + view.translation;
  if (!(t.z() > near_plane)) return std::nullopt;
  const float inv_z = 1.0f / t.z();

  ProjectedGaussian g;
  g.mean2d = Vec2f(k.fx * t.x() * inv_z + k.cx, k.fy * t.y() * inv_z + k.cy);
  g.view_depth = t.z();

  // T = J W with J the perspective Jacobian at the mean. The slopes x/z and
  // y/z are clamped to 1.3x the half field of view so splats beside the
  // camera do not explode into screen-filling footprints.
  const float lim_x = kJacobianClamp * 0.5f * static_cast<float>(k.width) / k.fx;
  const float lim_y = kJacobianClamp * 0.5f * static_cast<float>(k.height) / k.fy;
  const float sx = std::clamp(t.x() * inv_z, -lim_x, lim_x);
  const float sy = std::clamp(t.y() * inv_z, -lim_y, lim_y);
  Eigen::Matrix<float, 2, 3> jac;
  jac << k.fx * inv_z, 0.0f, -k.fx * sx * inv_z, 0.0f, k.fy * inv_z, -k.fy * sy * inv_z;
  const Eigen::Matrix<float, 2, 3> tm = jac * view.rotation;
  Mat3f sigma;
  sigma << cov[0], cov[1], cov[2], cov[1], cov[3], cov[4], cov[2], cov[4], cov[5];
  const Mat2f c2 = tm * sigma * tm.transpose();

  const float a = c2(0, 0) + kCovarianceRegularizer;
  const float b = c2(0, 1);
  const float c = c2(1, 1) + kCovarianceRegularizer;
  const float det = a * c - b * b;
  if (!(det > 0.0f)) return std::nullopt;
  g.cov2d = {a, b, c};
  const float inv_det = 1.0f / det;
  g.conic = {c * inv_det, -b * inv_det, a * inv_det};

  const float mid = 0.5f * (a + c);
  const float lambda_max = mid + std::sqrt(std::max(0.0f, mid * mid - det));
  g.radius = std::ceil(support_sigmas(opacity) * std::sqrt(lambda_max) * 1.001f);
  g.color = color;
  g.opacity = opacity;
  return g;
}

/// Full projection with culling: returns nullopt when behind the near plane,
/// transparent below the alpha cutoff, or when the footprint misses the image.
inline std::optional<ProjectedGaussian> project_gaussian(const Vec3f& position, const Cov3& cov, const Vec3f& color,
                                                         float opacity, const ViewTransform& view, const Intrinsics& k,
                                                         float near_plane) {
  if (!(std::min(opacity, kAlphaMax) >= kAlphaMin)) return std::nullopt;
  auto g = project_unclipped(position, cov, color, opacity, view, k, near_plane);
  if (!g) return std::nullopt;
  const int tiles_x = (k.width + kTileSize - 1) / kTileSize;
  const int tiles_y = (k.height + kTileSize - 1) / kTileSize;
  // Clamp in float before converting so far-off splats cannot overflow.
  auto tile_lo = [](float v, int n) {
    return static_cast<int>(std::clamp(std::floor(v / kTileSize), 0.0f, static_cast<float>(n)));
  };
  auto tile_hi = [](float v, int n) {
    return static_cast<int>(std::clamp(std::floor(v / kTileSize) + 1.0f, 0.0f, static_cast<float>(n)));
  };
  // Pixel coordinates covered: [mean - r, mean + r], clipped to [0, size - 1].
  const float x0 = g->mean2d.x() - g->radius, x1 = g->mean2d.x() + g->radius;
  const float y0 = g->mean2d.y() - g->radius, y1 = g->mean2d.y() + g->radius;
  if (x1 < 0.0f || y1 < 0.0f || x0 > static_cast<float>(k.width - 1) || y0 > static_cast<float>(k.height - 1))
    return std::nullopt;
  g->tile_min_x = tile_lo(x0, tiles_x);
  g->tile_max_x = tile_hi(x1, tiles_x);
  g->tile_min_y = tile_lo(y0, tiles_y);
  g->tile_max_y = tile_hi(y1, tiles_y);
  if (g->tile_min_x >= g->tile_max_x || g->tile_min_y >= g->tile_max_y) return std::nullopt;
  return g;
}

/// Convenience overload on an unpacked primitive (DC color).
inline std::optional<ProjectedGaussian> project_gaussian(const SplatPrimitive& s, const Pose& world_from_camera,
                                                         const Intrinsics& k, float near_plane) {
  return project_gaussian(s.position, covariance_3d(s.rotation, s.scale), s.base_color(), s.opacity,
                          ViewTransform::from(world_from_camera), k, near_plane);
}

/// Color of splat `i` as seen from the camera (SH evaluated when degree > 0).
inline Vec3f splat_color(const PackedSplats& p, std::size_t i, int sh_degree, const Vec3f& camera_center) {
  if (sh_degree <= 0 || !p.source) return p.color[i];
  const SplatPrimitive& s = (*p.source)[i];
  if (s.sh_degree == 0) return p.color[i];
  Vec3f dir = p.position[i] - camera_center;
  float n = dir.norm();
  if (n > 0.0f) dir /= n;
  return eval_sh(s, sh_degree, dir);
}

}  // namespace splatgym
