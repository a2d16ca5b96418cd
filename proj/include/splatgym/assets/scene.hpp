// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/mesh.hpp"
#include "splatgym/assets/splat.hpp"
#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace splatgym {

/// Half-plane test against a convex polygon of either winding. Points on an
/// edge count as inside.
inline bool point_in_convex_polygon(const Vec2d& p, const std::vector<Vec2d>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2d& a = poly[i];
    const Vec2d& b = poly[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cross > 0.0) pos = true;
    if (cross < 0.0) neg = true;
    if (pos && neg) return false;
  }
  return true;
}

/// Convex floor polygon (x,y) that penalizes a base standing inside it.
struct PenaltyRegion {
  std::vector<Vec2d> polygon;
  double weight = -5.0;

  bool contains(const Vec2d& p) const { return point_in_convex_polygon(p, polygon); }
};

/// Splats and collision mesh co-registered in one gravity-aligned frame (+Z up).
struct GaussianSplatScene {
  std::string scene_id;
  std::vector<SplatPrimitive> splats;
  CollisionMesh mesh;
  std::vector<Aabbd> spawn_regions;
  std::vector<PenaltyRegion> penalty_regions;
  double friction = 1.0;

  Aabbd splat_bounds() const {
    Aabbd b;
    for (const auto& s : splats) b.extend(s.position.cast<double>());
    return b;
  }

  /// Lowest mesh height; the floor reference for escape terminations.
  double floor_height() const { return mesh.empty() ? 0.0 : mesh.bounds().lo.z(); }
};

/// One scene entry of a manifest, with paths resolved against the manifest directory.
struct SceneSource {
  std::string scene_id;
  std::filesystem::path splats;
  std::filesystem::path mesh;
  double friction = 1.0;
  std::vector<Aabbd> spawn_regions;
  std::vector<PenaltyRegion> penalty_regions;
};

namespace detail {

inline Vec3d json_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw FormatError("manifest: '" + what + "' must be a 3-element array");
  return Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

inline std::vector<SceneSource> parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.contains("scenes") || !doc["scenes"].is_array())
    throw FormatError("manifest: top-level 'scenes' array required");
  std::vector<SceneSource> out;
  for (const auto& js : doc["scenes"]) {
    SceneSource s;
    try {
      s.scene_id = js.at("scene_id").get<std::string>();
      s.splats = base_dir / js.at("splats").get<std::string>();
      s.mesh = base_dir / js.at("mesh").get<std::string>();
      s.friction = js.value("friction", 1.0);
      for (const auto& box : js.value("spawn_regions", nlohmann::json::array())) {
        Aabbd b;
        b.lo = detail::json_vec3(box.at("min"), "spawn_regions.min");
        b.hi = detail::json_vec3(box.at("max"), "spawn_regions.max");
        if (b.empty()) throw FormatError("manifest: spawn region with min > max in scene '" + s.scene_id + "'");
        s.spawn_regions.push_back(b);
      }
      for (const auto& pr : js.value("penalty_regions", nlohmann::json::array())) {
        PenaltyRegion r;
        r.weight = pr.value("weight", -5.0);
        for (const auto& v : pr.at("polygon")) r.polygon.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        if (r.polygon.size() < 3)
          throw FormatError("manifest: penalty polygon needs >= 3 vertices in scene '" + s.scene_id + "'");
        s.penalty_regions.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("manifest: ") + e.what());
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw FormatError("manifest: no scenes listed");
  return out;
}

inline std::vector<SceneSource> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

inline GaussianSplatScene load_scene(const SceneSource& src) {
  GaussianSplatScene scene;
  scene.scene_id = src.scene_id;
  scene.splats = load_splat_ply(src.splats.string());
  scene.mesh = load_mesh(src.mesh.string());
  scene.friction = src.friction;
  scene.spawn_regions = src.spawn_regions;
  scene.penalty_regions = src.penalty_regions;
  return scene;
}

inline nlohmann::json scene_entry_json(const GaussianSplatScene& scene, const std::string& splat_file,
                                       const std::string& mesh_file) {
  nlohmann::json js;
  js["scene_id"] = scene.scene_id;
  js["splats"] = splat_file;
  js["mesh"] = mesh_file;
  js["friction"] = scene.friction;
  js["spawn_regions"] = nlohmann::json::array();
  for (const auto& b : scene.spawn_regions)
    js["spawn_regions"].push_back({{"min", {b.lo.x(), b.lo.y(), b.lo.z()}}, {"max", {b.hi.x(), b.hi.y(), b.hi.z()}}});
  js["penalty_regions"] = nlohmann::json::array();
  for (const auto& r : scene.penalty_regions) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& v : r.polygon) poly.push_back({v.x(), v.y()});
    js["penalty_regions"].push_back({{"weight", r.weight}, {"polygon", poly}});
  }
  return js;
}

/// Writes splats (PLY), mesh (OBJ) and a manifest listing the given scenes into `dir`.
inline std::filesystem::path write_scene_bundle(const std::filesystem::path& dir,
                                                const std::vector<const GaussianSplatScene*>& scenes) {
  std::filesystem::create_directories(dir);
  nlohmann::json doc;
  doc["scenes"] = nlohmann::json::array();
  for (const auto* s : scenes) {
    std::string splat_file = s->scene_id + "_splats.ply";
    std::string mesh_file = s->scene_id + "_mesh.obj";
    save_splat_ply((dir / splat_file).string(), s->splats);
    save_obj((dir / mesh_file).string(), s->mesh);
    doc["scenes"].push_back(scene_entry_json(*s, splat_file, mesh_file));
  }
  auto manifest = dir / "manifest.json";
  std::ofstream out(manifest);
  if (!out) throw IoError("cannot write '" + manifest.string() + "'");
  out << doc.dump(2) << '\n';
  return manifest;
}

}  // namespace splatgym
