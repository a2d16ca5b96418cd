// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace splatgym {

using Vec2f = Eigen::Vector2f;
using Vec3f = Eigen::Vector3f;
using Vec2d = Eigen::Vector2d;
using Vec3d = Eigen::Vector3d;
using Mat2f = Eigen::Matrix2f;
using Mat3f = Eigen::Matrix3f;
using Mat3d = Eigen::Matrix3d;
using Quatf = Eigen::Quaternionf;
using Quatd = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGravity = 9.81;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Rigid transform: x_parent = rotation * x_child + translation.
struct Pose {
  Quatd rotation = Quatd::Identity();
  Vec3d translation = Vec3d::Zero();

  Vec3d apply(const Vec3d& p) const { return rotation * p + translation; }

  Pose compose(const Pose& child) const {
    return Pose{(rotation * child.rotation).normalized(), apply(child.translation)};
  }

  Pose inverse() const {
    Quatd inv = rotation.conjugate();
    return Pose{inv, -(inv * translation)};
  }
};

/// Rotation of `omega * t` applied as an axis-angle vector.
inline Quatd axis_angle(const Vec3d& rotvec) {
  double angle = rotvec.norm();
  if (angle == 0.0) return Quatd::Identity();
  return Quatd(Eigen::AngleAxisd(angle, rotvec / angle));
}

inline double yaw_of(const Quatd& q) {
  Vec3d fwd = q * Vec3d::UnitX();
  return std::atan2(fwd.y(), fwd.x());
}

/// Angle between the body's up axis and world +Z, radians.
inline double tilt_angle(const Quatd& q) {
  double c = (q * Vec3d::UnitZ()).z();
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Axis-aligned box.
template <typename Scalar>
struct Aabb {
  using V = Eigen::Matrix<Scalar, 3, 1>;
  V lo = V::Constant(std::numeric_limits<Scalar>::infinity());
  V hi = V::Constant(-std::numeric_limits<Scalar>::infinity());

  bool empty() const { return (lo.array() > hi.array()).any(); }
  void extend(const V& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const V& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  V extent() const { return empty() ? V::Zero() : V(hi - lo); }
  V center() const { return (lo + hi) / Scalar(2); }
  Scalar volume() const {
    if (empty()) return Scalar(0);
    V e = hi - lo;
    return e.x() * e.y() * e.z();
  }
  Aabb inflated(Scalar pad) const {
    Aabb b = *this;
    b.lo.array() -= pad;
    b.hi.array() += pad;
    return b;
  }
  /// Squared distance from a point to the box (0 inside).
  Scalar sq_distance(const V& p) const {
    V d = (lo - p).cwiseMax(p - hi).cwiseMax(V::Zero());
    return d.squaredNorm();
  }
};

using Aabbd = Aabb<double>;
using Aabbf = Aabb<float>;

template <typename Scalar>
Scalar iou(const Aabb<Scalar>& a, const Aabb<Scalar>& b) {
  Aabb<Scalar> inter;
  inter.lo = a.lo.cwiseMax(b.lo);
  inter.hi = a.hi.cwiseMin(b.hi);
  Scalar vi = inter.volume();
  Scalar vu = a.volume() + b.volume() - vi;
  return vu > Scalar(0) ? vi / vu : Scalar(0);
}

}  // namespace splatgym
