// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal binary little-endian PLY reader/writer shared by the splat and
// mesh loaders.

#include "splatgym/core/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace splatgym::ply {

static_assert(std::endian::native == std::endian::little, "PLY I/O assumes a little-endian host");

enum class Type : std::uint8_t { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline std::size_t type_size(Type t) {
  switch (t) {
    case Type::Int8:
    case Type::UInt8: return 1;
    case Type::Int16:
    case Type::UInt16: return 2;
    case Type::Int32:
    case Type::UInt32:
    case Type::Float32: return 4;
    case Type::Float64: return 8;
  }
  return 0;
}

inline std::optional<Type> parse_type(const std::string& s) {
  if (s == "char" || s == "int8") return Type::Int8;
  if (s == "uchar" || s == "uint8") return Type::UInt8;
  if (s == "short" || s == "int16") return Type::Int16;
  if (s == "ushort" || s == "uint16") return Type::UInt16;
  if (s == "int" || s == "int32") return Type::Int32;
  if (s == "uint" || s == "uint32") return Type::UInt32;
  if (s == "float" || s == "float32") return Type::Float32;
  if (s == "double" || s == "float64") return Type::Float64;
  return std::nullopt;
}

struct Property {
  std::string name;
  Type type = Type::Float32;
  bool is_list = false;
  Type count_type = Type::UInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;

  std::optional<std::size_t> find(const std::string& prop) const {
    for (std::size_t i = 0; i < properties.size(); ++i)
      if (properties[i].name == prop) return i;
    return std::nullopt;
  }

  /// Byte stride of one record, or nullopt when the element has list properties.
  std::optional<std::size_t> fixed_stride() const {
    std::size_t s = 0;
    for (const auto& p : properties) {
      if (p.is_list) return std::nullopt;
      s += type_size(p.type);
    }
    return s;
  }
};

struct Header {
  std::vector<Element> elements;

  const Element* find(const std::string& name) const {
    for (const auto& e : elements)
      if (e.name == name) return &e;
    return nullptr;
  }
};

/// Parses the header and leaves `in` positioned at the first data byte.
inline Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("PLY: empty file");
  if (line != "ply" && line != "ply\r") throw FormatError("PLY: missing 'ply' magic");
  Header h;
  bool have_format = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian")
        throw FormatError("PLY: unsupported format '" + fmt + "' (binary_little_endian required)");
      have_format = true;
    } else if (kw == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls) throw FormatError("PLY: malformed element line: " + line);
      h.elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (h.elements.empty()) throw FormatError("PLY: property before any element");
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        auto c = parse_type(ct);
        auto i = parse_type(it);
        if (!c || !i) throw FormatError("PLY: bad list property types: " + line);
        p.is_list = true;
        p.count_type = *c;
        p.type = *i;
      } else {
        auto ty = parse_type(t);
        if (!ty) throw FormatError("PLY: unknown property type '" + t + "'");
        p.type = *ty;
        ls >> p.name;
      }
      h.elements.back().properties.push_back(std::move(p));
    } else if (kw == "end_header") {
      if (!have_format) throw FormatError("PLY: missing format line");
      return h;
    }
    // comment / obj_info lines are ignored
  }
  throw FormatError("PLY: header not terminated by end_header");
}

inline double decode(Type t, const unsigned char* p) {
  switch (t) {
    case Type::Int8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case Type::UInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case Type::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case Type::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case Type::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case Type::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case Type::Float32: { float v; std::memcpy(&v, p, 4); return v; }
    case Type::Float64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

inline void read_exact(std::istream& in, void* dst, std::size_t n, const std::string& what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError("PLY: truncated data in " + what);
}

/// Reads a fixed-stride element as raw bytes.
inline std::vector<unsigned char> read_fixed(std::istream& in, const Element& e) {
  auto stride = e.fixed_stride();
  if (!stride) throw FormatError("PLY: element '" + e.name + "' has list properties");
  std::vector<unsigned char> buf(*stride * e.count);
  read_exact(in, buf.data(), buf.size(), e.name);
  return buf;
}

/// Skips the data of one element (fixed or list layout).
inline void skip_element(std::istream& in, const Element& e) {
  if (auto stride = e.fixed_stride()) {
    in.seekg(static_cast<std::streamoff>(*stride * e.count), std::ios::cur);
    return;
  }
  unsigned char tmp[8];
  for (std::size_t r = 0; r < e.count; ++r) {
    for (const auto& p : e.properties) {
      if (!p.is_list) {
        in.seekg(static_cast<std::streamoff>(type_size(p.type)), std::ios::cur);
        continue;
      }
      read_exact(in, tmp, type_size(p.count_type), e.name);
      auto n = static_cast<std::size_t>(decode(p.count_type, tmp));
      in.seekg(static_cast<std::streamoff>(n * type_size(p.type)), std::ios::cur);
    }
  }
}

/// Column offsets for fast access into a fixed-stride record.
inline std::size_t offset_of(const Element& e, std::size_t prop_index) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < prop_index; ++i) off += type_size(e.properties[i].type);
  return off;
}

inline std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace splatgym::ply
