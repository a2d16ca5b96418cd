// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/geometry.hpp"
#include "splatgym/assets/ply.hpp"
#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace splatgym {

using Triangle = std::array<std::uint32_t, 3>;

/// Result of a nearest-triangle query.
struct ClosestHit {
  std::uint32_t triangle = 0;
  Vec3d point = Vec3d::Zero();
  double sq_distance = std::numeric_limits<double>::infinity();
};

/// Sphere/mesh contact: `normal` points from the surface toward the sphere center.
struct Contact {
  std::uint32_t triangle = 0;
  Vec3d point = Vec3d::Zero();
  Vec3d normal = Vec3d::UnitZ();
  double depth = 0.0;
};

struct RayHit {
  std::uint32_t triangle = 0;
  double t = 0.0;
  Vec3d point = Vec3d::Zero();
};

/// Triangle mesh with a bounding volume hierarchy. Immutable after construction.
class CollisionMesh {
 public:
  CollisionMesh() = default;

  /// Drops zero-area triangles, recomputes normals from winding and builds the hierarchy.
  CollisionMesh(std::vector<Vec3d> vertices, const std::vector<Triangle>& triangles,
                double min_area = 1e-12)
      : vertices_(std::move(vertices)) {
    for (const auto& t : triangles) {
      for (auto i : t)
        if (i >= vertices_.size())
          throw FormatError("mesh: triangle index " + std::to_string(i) + " out of range (" +
                            std::to_string(vertices_.size()) + " vertices)");
      Vec3d n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
      double area = 0.5 * n.norm();
      if (!(area > min_area)) continue;
      triangles_.push_back(t);
      normals_.push_back(n.normalized());
    }
    build();
  }

  const std::vector<Vec3d>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3d>& normals() const { return normals_; }
  std::size_t size() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }
  const Aabbd& bounds() const { return nodes_.empty() ? empty_box_ : nodes_.front().box; }

  Vec3d corner(std::uint32_t tri, int k) const { return vertices_[triangles_[tri][static_cast<std::size_t>(k)]]; }
  double area(std::uint32_t tri) const {
    return 0.5 * (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0)).norm();
  }

  /// Nearest triangle to `p`; ties resolve to the lowest triangle index.
  std::optional<ClosestHit> closest(const Vec3d& p,
                                    double max_sq_distance = std::numeric_limits<double>::infinity()) const {
    if (empty()) return std::nullopt;
    ClosestHit best;
    best.sq_distance = max_sq_distance;
    bool found = false;
    traverse([&](const Node& n) { return n.box.sq_distance(p) <= best.sq_distance; },
             [&](std::uint32_t tri) {
               Vec3d q = geom::closest_point_on_triangle(p, corner(tri, 0), corner(tri, 1), corner(tri, 2));
               double d = (q - p).squaredNorm();
               if (d < best.sq_distance || (d == best.sq_distance && (!found || tri < best.triangle))) {
                 if (d > max_sq_distance) return;
                 best = {tri, q, d};
                 found = true;
               }
             });
    if (!found) return std::nullopt;
    return best;
  }

  /// Contact depth of a sphere against one triangle, or nullopt when separated.
  std::optional<Contact> sphere_triangle(const Vec3d& center, double radius, std::uint32_t tri) const {
    Vec3d q = geom::closest_point_on_triangle(center, corner(tri, 0), corner(tri, 1), corner(tri, 2));
    Vec3d delta = center - q;
    double d = delta.norm();
    if (!(d < radius)) return std::nullopt;
    const Vec3d& n = normals_[tri];
    Contact c;
    c.triangle = tri;
    c.point = q;
    if (d == 0.0 || delta.dot(n) < 0.0) {
      // Center on or behind the face: push out along the face normal.
      c.normal = n;
      c.depth = radius + d;
    } else {
      c.normal = delta / d;
      c.depth = radius - d;
    }
    return c;
  }

  /// Deepest-penetration contact of a sphere; ties resolve to the lowest triangle index.
  std::optional<Contact> sphere_contact(const Vec3d& center, double radius) const {
    std::optional<Contact> best;
    const double r2 = radius * radius;
    traverse([&](const Node& n) { return n.box.sq_distance(center) < r2; },
             [&](std::uint32_t tri) {
               auto c = sphere_triangle(center, radius, tri);
               if (!c) return;
               if (!best || c->depth > best->depth || (c->depth == best->depth && tri < best->triangle)) best = c;
             });
    return best;
  }

  /// First hit along the ray within [0, tmax]; ties resolve to the lowest triangle index.
  std::optional<RayHit> raycast(const Vec3d& origin, const Vec3d& dir,
                                double tmax = std::numeric_limits<double>::infinity()) const {
    if (empty()) return std::nullopt;
    const Vec3d inv = dir.cwiseInverse();
    std::optional<RayHit> best;
    double limit = tmax;
    traverse(
        [&](const Node& n) {
          auto t = geom::ray_box(origin, inv, n.box, limit);
          return t.has_value();
        },
        [&](std::uint32_t tri) {
          auto t = geom::ray_triangle(origin, dir, corner(tri, 0), corner(tri, 1), corner(tri, 2));
          if (!t || *t > limit) return;
          if (!best || *t < best->t || (*t == best->t && tri < best->triangle)) {
            best = RayHit{tri, *t, origin + *t * dir};
            limit = *t;
          }
        });
    return best;
  }

  /// Every triangle referenced exactly once by a leaf whose box contains it.
  bool hierarchy_consistent() const {
    std::vector<int> seen(triangles_.size(), 0);
    for (const auto& n : nodes_) {
      if (n.count == 0) continue;
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        std::uint32_t tri = order_[i];
        ++seen[tri];
        for (int k = 0; k < 3; ++k)
          if (!n.box.contains(corner(tri, k))) return false;
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  }

 private:
  struct Node {
    Aabbd box;
    std::uint32_t first = 0;  // leaf: offset into order_; inner: right child index
    std::uint32_t count = 0;  // 0 for inner nodes; left child is this + 1
  };

  static constexpr std::uint32_t kLeafSize = 4;

  void build() {
    nodes_.clear();
    order_.resize(triangles_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (triangles_.empty()) return;
    std::vector<Vec3d> centroids(triangles_.size());
    for (std::uint32_t t = 0; t < triangles_.size(); ++t)
      centroids[t] = (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0;
    nodes_.reserve(2 * triangles_.size() / kLeafSize + 2);
    build_node(0, static_cast<std::uint32_t>(triangles_.size()), centroids);
  }

  std::uint32_t build_node(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3d>& centroids) {
    auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabbd box, cbox;
    for (std::uint32_t i = begin; i < end; ++i) {
      for (int k = 0; k < 3; ++k) box.extend(corner(order_[i], k));
      cbox.extend(centroids[order_[i]]);
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
      nodes_[index].first = begin;
      nodes_[index].count = end - begin;
      return index;
    }
    int axis = 0;
    Vec3d ext = cbox.extent();
    if (ext.y() > ext[axis]) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;
    std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                       return a < b;
                     });
    build_node(begin, mid, centroids);
    std::uint32_t right = build_node(mid, end, centroids);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
  }

  template <typename Visit, typename Leaf>
  void traverse(Visit&& visit, Leaf&& leaf) const {
    if (nodes_.empty()) return;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& n = nodes_[stack[--top]];
      if (!visit(n)) continue;
      if (n.count > 0) {
        for (std::uint32_t i = n.first; i < n.first + n.count; ++i) leaf(order_[i]);
      } else {
        auto self = static_cast<std::uint32_t>(&n - nodes_.data());
        stack[top++] = n.first;
        stack[top++] = self + 1;
      }
    }
  }

  std::vector<Vec3d> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3d> normals_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  Aabbd empty_box_;
};

namespace detail {

inline CollisionMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<Vec3d> verts;
  std::vector<Triangle> tris;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "v") {
      Vec3d v;
      ls >> v.x() >> v.y() >> v.z();
      if (!ls) throw FormatError("OBJ '" + path + "': bad vertex on line " + std::to_string(lineno));
      verts.push_back(v);
    } else if (kw == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ls >> tok) {
        long idx = std::stol(tok.substr(0, tok.find('/')));
        if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
        if (idx < 1) throw FormatError("OBJ '" + path + "': bad face index on line " + std::to_string(lineno));
        poly.push_back(static_cast<std::uint32_t>(idx - 1));
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return CollisionMesh(std::move(verts), tris);
}

inline CollisionMesh load_mesh_ply(const std::string& path) {
  auto in = ply::open_binary(path);
  ply::Header h = ply::read_header(in);
  std::vector<Vec3d> verts;
  std::vector<Triangle> tris;
  for (const auto& e : h.elements) {
    if (e.name == "vertex") {
      auto x = e.find("x"), y = e.find("y"), z = e.find("z");
      if (!x || !y || !z) throw FormatError("mesh PLY '" + path + "': vertex needs x,y,z");
      auto raw = ply::read_fixed(in, e);
      std::size_t stride = *e.fixed_stride();
      std::size_t ox = ply::offset_of(e, *x), oy = ply::offset_of(e, *y), oz = ply::offset_of(e, *z);
      for (std::size_t r = 0; r < e.count; ++r) {
        const unsigned char* rec = raw.data() + r * stride;
        verts.emplace_back(ply::decode(e.properties[*x].type, rec + ox), ply::decode(e.properties[*y].type, rec + oy),
                           ply::decode(e.properties[*z].type, rec + oz));
      }
    } else if (e.name == "face") {
      unsigned char buf[8];
      for (std::size_t r = 0; r < e.count; ++r) {
        for (const auto& p : e.properties) {
          if (!p.is_list) {
            ply::read_exact(in, buf, ply::type_size(p.type), "face");
            continue;
          }
          ply::read_exact(in, buf, ply::type_size(p.count_type), "face");
          auto n = static_cast<std::size_t>(ply::decode(p.count_type, buf));
          std::vector<std::uint32_t> poly(n);
          for (auto& v : poly) {
            ply::read_exact(in, buf, ply::type_size(p.type), "face");
            v = static_cast<std::uint32_t>(ply::decode(p.type, buf));
          }
          if (p.name != "vertex_indices" && p.name != "vertex_index") continue;
          for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
        }
      }
    } else {
      ply::skip_element(in, e);
    }
  }
  return CollisionMesh(std::move(verts), tris);
}

}  // namespace detail

/// Loads an OBJ or binary PLY triangle mesh (polygons are fan-triangulated).
inline CollisionMesh load_mesh(const std::string& path) {
  auto ends_with = [&](const char* ext) {
    std::string e(ext);
    if (path.size() < e.size()) return false;
    std::string tail = path.substr(path.size() - e.size());
    std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
    return tail == e;
  };
  CollisionMesh mesh;
  if (ends_with(".obj")) {
    mesh = detail::load_obj(path);
  } else if (ends_with(".ply")) {
    mesh = detail::load_mesh_ply(path);
  } else {
    throw FormatError("mesh '" + path + "': unsupported extension (expected .obj or .ply)");
  }
  if (mesh.empty()) throw FormatError("mesh '" + path + "': no non-degenerate triangles");
  return mesh;
}

inline void save_obj(const std::string& path, const CollisionMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

}  // namespace splatgym
