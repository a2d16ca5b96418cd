// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/scene.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace splatgym {

inline constexpr double kGravityToleranceDeg = 5.0;

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::string scene_id;
  std::vector<ValidationCheck> checks;
  std::size_t splat_count = 0;
  std::size_t triangle_count = 0;
  Aabbd splat_bounds;
  Aabbd mesh_bounds;
  std::optional<Vec3d> floor_normal;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Area-dominant upward-facing plane normal of the mesh, or nullopt when the
/// mesh has no upward-facing triangles.
inline std::optional<Vec3d> dominant_floor_normal(const CollisionMesh& mesh) {
  // Bin upward-facing normals on a 1-degree (polar, azimuth) grid by area.
  constexpr double kBinDeg = 1.0;
  std::map<std::pair<int, int>, double> bins;
  const double rad2deg = 180.0 / kPi;
  auto bin_of = [&](const Vec3d& n) {
    double polar = std::acos(std::clamp(n.z(), -1.0, 1.0)) * rad2deg;
    double az = std::atan2(n.y(), n.x()) * rad2deg;
    int pb = static_cast<int>(std::floor(polar / kBinDeg));
    // Azimuth is meaningless at the pole.
    int ab = polar < kBinDeg ? 0 : static_cast<int>(std::floor((az + 180.0) / kBinDeg));
    return std::make_pair(pb, ab);
  };
  for (std::uint32_t t = 0; t < mesh.size(); ++t) {
    const Vec3d& n = mesh.normals()[t];
    if (n.z() <= 0.0) continue;
    bins[bin_of(n)] += mesh.area(t);
  }
  if (bins.empty()) return std::nullopt;
  auto best = std::max_element(bins.begin(), bins.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  // Refine: area-weighted mean of normals falling in the winning bin.
  Vec3d sum = Vec3d::Zero();
  for (std::uint32_t t = 0; t < mesh.size(); ++t) {
    const Vec3d& n = mesh.normals()[t];
    if (n.z() > 0.0 && bin_of(n) == best->first) sum += mesh.area(t) * n;
  }
  return sum.normalized();
}

inline ValidationReport validate_scene(const GaussianSplatScene& scene) {
  ValidationReport r;
  r.scene_id = scene.scene_id;
  r.splat_count = scene.splats.size();
  r.triangle_count = scene.mesh.size();
  r.splat_bounds = scene.splat_bounds();
  r.mesh_bounds = scene.mesh.bounds();

  r.checks.push_back({"splat_count", r.splat_count > 0, "splats=" + std::to_string(r.splat_count)});
  r.checks.push_back({"triangle_count", r.triangle_count > 0, "triangles=" + std::to_string(r.triangle_count)});

  r.floor_normal = dominant_floor_normal(scene.mesh);
  {
    ValidationCheck c{"gravity_alignment", false, ""};
    if (!r.floor_normal) {
      c.detail = "no upward-facing floor plane found";
    } else {
      double deg = std::acos(std::clamp(r.floor_normal->z(), -1.0, 1.0)) * 180.0 / kPi;
      c.passed = deg <= kGravityToleranceDeg;
      std::ostringstream os;
      os << "floor normal " << deg << " deg from +Z (limit " << kGravityToleranceDeg << ")";
      c.detail = os.str();
    }
    r.checks.push_back(c);
  }
  {
    // Planar splat sets (e.g. all on a floor) have zero-volume boxes; pad both by 1 mm.
    constexpr double kPad = 1e-3;
    double overlap = 0.0;
    if (!r.splat_bounds.empty() && !r.mesh_bounds.empty())
      overlap = iou(r.splat_bounds.inflated(kPad), r.mesh_bounds.inflated(kPad));
    std::ostringstream os;
    os << "splat/mesh bbox IoU " << overlap;
    r.checks.push_back({"coregistration", overlap > 0.0, os.str()});
  }
  return r;
}

inline void print_report(std::ostream& os, const ValidationReport& r) {
  auto box = [](const Aabbd& b) {
    std::ostringstream s;
    if (b.empty()) return std::string("empty");
    s << "[" << b.lo.x() << "," << b.lo.y() << "," << b.lo.z() << "]-[" << b.hi.x() << "," << b.hi.y() << ","
      << b.hi.z() << "]";
    return s.str();
  };
  os << "scene " << r.scene_id << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : r.checks) os << "  " << c.name << ": " << (c.passed ? "pass" : "FAIL") << " (" << c.detail << ")\n";
  os << "  stats: splats=" << r.splat_count << " triangles=" << r.triangle_count << " splat_extent=" << box(r.splat_bounds)
     << " mesh_extent=" << box(r.mesh_bounds) << "\n";
}

}  // namespace splatgym
