// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/math.hpp"

#include <optional>

namespace splatgym::geom {

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3d closest_point_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
  const Vec3d ab = b - a;
  const Vec3d ac = c - a;
  const Vec3d ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3d bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3d cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

/// Two-sided ray/triangle intersection (Moller-Trumbore). Returns the ray
/// parameter of the hit.
inline std::optional<double> ray_triangle(const Vec3d& origin, const Vec3d& dir, const Vec3d& a,
                                          const Vec3d& b, const Vec3d& c) {
  constexpr double kEps = 1e-12;
  const Vec3d e1 = b - a;
  const Vec3d e2 = c - a;
  const Vec3d pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < kEps) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3d tv = origin - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3d qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qv) * inv;
  if (t < 0.0) return std::nullopt;
  return t;
}

/// Slab test; returns the entry parameter when the ray hits the box within [0, tmax].
inline std::optional<double> ray_box(const Vec3d& origin, const Vec3d& inv_dir, const Aabbd& box, double tmax) {
  double t0 = 0.0, t1 = tmax;
  for (int i = 0; i < 3; ++i) {
    double a = (box.lo[i] - origin[i]) * inv_dir[i];
    double b = (box.hi[i] - origin[i]) * inv_dir[i];
    if (a > b) std::swap(a, b);
    // NaN from 0*inf means the ray lies in the slab plane; treat as inside.
    if (!std::isnan(a)) t0 = std::max(t0, a);
    if (!std::isnan(b)) t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace splatgym::geom
