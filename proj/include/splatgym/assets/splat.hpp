// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/ply.hpp"
#include "splatgym/core/error.hpp"
#include "splatgym/core/math.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace splatgym {

/// Degree-0 spherical harmonic basis constant.
inline constexpr float kShC0 = 0.28209479177387814f;

/// Number of non-DC SH coefficients per channel for degree 1..3.
inline constexpr int sh_rest_count(int degree) { return (degree + 1) * (degree + 1) - 1; }

/// One oriented 3D gaussian with activations applied.
struct SplatPrimitive {
  Vec3f position = Vec3f::Zero();
  Quatf rotation = Quatf::Identity();  // unit, (w,x,y,z)
  Vec3f scale = Vec3f::Constant(0.01f);  // per-axis standard deviation, meters
  float opacity = 1.0f;
  std::array<float, 3> sh_dc{0.0f, 0.0f, 0.0f};
  // Channel-major higher-order coefficients: [r_1..r_15, g_1..g_15, b_1..b_15].
  std::array<float, 45> sh_rest{};
  int sh_degree = 0;

  /// View-independent color from the DC term, clamped to [0,1].
  Vec3f base_color() const {
    Vec3f c;
    for (int i = 0; i < 3; ++i) c[i] = std::clamp(kShC0 * sh_dc[i] + 0.5f, 0.0f, 1.0f);
    return c;
  }

  void set_base_color(const Vec3f& rgb) {
    for (int i = 0; i < 3; ++i) sh_dc[i] = (rgb[i] - 0.5f) / kShC0;
  }
};

namespace activation {

inline float sigmoid(float x) { return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(x)))); }
inline float exp(float x) { return static_cast<float>(std::exp(static_cast<double>(x))); }

/// Finds a raw value whose activation reproduces `target` bit-exactly when one
/// exists near the analytic inverse; falls back to the analytic inverse.
template <typename Fwd>
float invert_exact(float target, float guess, Fwd fwd) {
  if (!std::isfinite(guess)) return guess;
  if (fwd(guess) == target) return guess;
  float lo = guess, hi = guess;
  for (int i = 0; i < 64; ++i) {
    lo = std::nextafter(lo, -std::numeric_limits<float>::infinity());
    hi = std::nextafter(hi, std::numeric_limits<float>::infinity());
    if (fwd(lo) == target) return lo;
    if (fwd(hi) == target) return hi;
  }
  return guess;
}

inline float inverse_sigmoid(float y) {
  double yc = std::clamp(static_cast<double>(y), 1e-12, 1.0 - 1e-12);
  auto guess = static_cast<float>(std::log(yc / (1.0 - yc)));
  return invert_exact(y, guess, sigmoid);
}

inline float inverse_exp(float y) {
  auto guess = static_cast<float>(std::log(static_cast<double>(y)));
  return invert_exact(y, guess, activation::exp);
}

/// Normalizes unless already unit to float precision, so re-normalizing a
/// stored quaternion is the identity.
inline Quatf normalize(const Quatf& q) {
  double n = std::sqrt(static_cast<double>(q.w()) * q.w() + static_cast<double>(q.x()) * q.x() +
                       static_cast<double>(q.y()) * q.y() + static_cast<double>(q.z()) * q.z());
  if (std::abs(n - 1.0) <= 4e-7) return q;
  return Quatf(static_cast<float>(q.w() / n), static_cast<float>(q.x() / n),
               static_cast<float>(q.y() / n), static_cast<float>(q.z() / n));
}

}  // namespace activation

namespace detail {

inline std::string indexed(const char* base, int i) { return std::string(base) + std::to_string(i); }

}  // namespace detail

/// Loads a 3DGS-convention binary little-endian PLY.
inline std::vector<SplatPrimitive> load_splat_ply(const std::string& path) {
  auto in = ply::open_binary(path);
  in.seekg(0, std::ios::end);
  if (in.tellg() == 0) throw FormatError("splat PLY '" + path + "': empty file");
  in.seekg(0);

  ply::Header header = ply::read_header(in);
  const ply::Element* vertex = header.find("vertex");
  if (vertex == nullptr) throw FormatError("splat PLY '" + path + "': missing element 'vertex'");

  auto column = [&](const std::string& name) -> std::size_t {
    auto idx = vertex->find(name);
    if (!idx) throw FormatError("splat PLY '" + path + "': missing property '" + name + "'");
    if (vertex->properties[*idx].is_list)
      throw FormatError("splat PLY '" + path + "': property '" + name + "' must be scalar");
    return *idx;
  };

  std::array<std::size_t, 3> pos{column("x"), column("y"), column("z")};
  std::array<std::size_t, 3> dc{column("f_dc_0"), column("f_dc_1"), column("f_dc_2")};
  std::size_t opa = column("opacity");
  std::array<std::size_t, 3> scl{column("scale_0"), column("scale_1"), column("scale_2")};
  std::array<std::size_t, 4> rot{column("rot_0"), column("rot_1"), column("rot_2"), column("rot_3")};

  int rest_total = 0;
  while (vertex->find(detail::indexed("f_rest_", rest_total))) ++rest_total;
  int degree = 0;
  if (rest_total > 0) {
    for (int d = 1; d <= 3; ++d)
      if (3 * sh_rest_count(d) == rest_total) degree = d;
    if (degree == 0)
      throw FormatError("splat PLY '" + path + "': f_rest count " + std::to_string(rest_total) +
                        " does not match SH degree 1..3");
  }
  std::vector<std::size_t> rest;
  for (int i = 0; i < rest_total; ++i) rest.push_back(column(detail::indexed("f_rest_", i)));

  // Elements before 'vertex' must be skipped to reach its data.
  for (const auto& e : header.elements) {
    if (&e == vertex) break;
    ply::skip_element(in, e);
  }
  if (vertex->count == 0) throw FormatError("splat PLY '" + path + "': no vertices");

  auto raw = ply::read_fixed(in, *vertex);
  const std::size_t stride = *vertex->fixed_stride();
  std::vector<std::size_t> offsets(vertex->properties.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) offsets[i] = ply::offset_of(*vertex, i);

  std::vector<SplatPrimitive> out(vertex->count);
  for (std::size_t r = 0; r < vertex->count; ++r) {
    const unsigned char* rec = raw.data() + r * stride;
    auto get = [&](std::size_t col) -> float {
      auto v = static_cast<float>(ply::decode(vertex->properties[col].type, rec + offsets[col]));
      if (std::isnan(v))
        throw FormatError("splat PLY '" + path + "': NaN in property '" + vertex->properties[col].name +
                          "' of record " + std::to_string(r));
      return v;
    };
    SplatPrimitive& s = out[r];
    s.position = Vec3f(get(pos[0]), get(pos[1]), get(pos[2]));
    for (int c = 0; c < 3; ++c) s.sh_dc[c] = get(dc[c]);
    s.opacity = activation::sigmoid(get(opa));
    s.scale = Vec3f(activation::exp(get(scl[0])), activation::exp(get(scl[1])), activation::exp(get(scl[2])));
    Quatf q(get(rot[0]), get(rot[1]), get(rot[2]), get(rot[3]));
    if (q.squaredNorm() == 0.0f)
      throw FormatError("splat PLY '" + path + "': zero quaternion in record " + std::to_string(r));
    s.rotation = activation::normalize(q);
    s.sh_degree = degree;
    for (int i = 0; i < rest_total; ++i) s.sh_rest[static_cast<std::size_t>(i)] = get(rest[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Writes splats in the layout `load_splat_ply` reads. The SH degree written is
/// the maximum degree present.
inline void save_splat_ply(const std::string& path, const std::vector<SplatPrimitive>& splats) {
  int degree = 0;
  for (const auto& s : splats) degree = std::max(degree, s.sh_degree);
  const int rest_total = degree > 0 ? 3 * sh_rest_count(degree) : 0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << splats.size() << "\n";
  for (const char* p : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"})
    out << "property float " << p << "\n";
  for (int i = 0; i < rest_total; ++i) out << "property float f_rest_" << i << "\n";
  for (const char* p : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"})
    out << "property float " << p << "\n";
  out << "end_header\n";

  std::vector<float> rec;
  for (const auto& s : splats) {
    rec.clear();
    rec.insert(rec.end(), {s.position.x(), s.position.y(), s.position.z(), 0.0f, 0.0f, 0.0f});
    rec.insert(rec.end(), s.sh_dc.begin(), s.sh_dc.end());
    // Re-pack each channel's block to the file degree.
    const int own = s.sh_degree > 0 ? sh_rest_count(s.sh_degree) : 0;
    const int file = degree > 0 ? sh_rest_count(degree) : 0;
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < file; ++k)
        rec.push_back(k < own ? s.sh_rest[static_cast<std::size_t>(c * own + k)] : 0.0f);
    rec.push_back(activation::inverse_sigmoid(s.opacity));
    for (int i = 0; i < 3; ++i) rec.push_back(activation::inverse_exp(s.scale[i]));
    rec.insert(rec.end(), {s.rotation.w(), s.rotation.x(), s.rotation.y(), s.rotation.z()});
    out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace splatgym
