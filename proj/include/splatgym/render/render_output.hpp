// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace splatgym {

/// Mutable view of one camera's float planes.
struct FrameView {
  float* linear_rgb = nullptr;  // H*W*3
  float* depth = nullptr;       // H*W
  float* alpha = nullptr;       // H*W
  int width = 0;
  int height = 0;
};

inline std::uint8_t quantize_channel(float v) {
  return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0f, 1.0f) * 255.0f + 0.5f));
}

/// Packed N x H x W buffers, row-major and contiguous. `linear_rgb` keeps the
/// pre-quantization color that `rgb` is derived from.
struct RenderOutput {
  std::size_t count = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;
  std::vector<float> depth;
  std::vector<float> accum_alpha;
  std::vector<float> linear_rgb;

  void resize(std::size_t n, int h, int w) {
    count = n;
    height = h;
    width = w;
    const std::size_t px = pixels();
    rgb.assign(n * px * 3, 0);
    depth.assign(n * px, 0.0f);
    accum_alpha.assign(n * px, 0.0f);
    linear_rgb.assign(n * px * 3, 0.0f);
  }

  std::size_t pixels() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }

  FrameView frame(std::size_t i) {
    const std::size_t px = pixels();
    return {linear_rgb.data() + i * px * 3, depth.data() + i * px, accum_alpha.data() + i * px, width, height};
  }

  std::span<const std::uint8_t> rgb_frame(std::size_t i) const { return {rgb.data() + i * pixels() * 3, pixels() * 3}; }
  std::span<const float> depth_frame(std::size_t i) const { return {depth.data() + i * pixels(), pixels()}; }
  std::span<const float> alpha_frame(std::size_t i) const { return {accum_alpha.data() + i * pixels(), pixels()}; }
  std::span<const float> linear_frame(std::size_t i) const {
    return {linear_rgb.data() + i * pixels() * 3, pixels() * 3};
  }

  void quantize(std::size_t i) {
    const std::size_t n = pixels() * 3;
    const float* src = linear_rgb.data() + i * n;
    std::uint8_t* dst = rgb.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) dst[k] = quantize_channel(src[k]);
  }

  void quantize_all() {
    for (std::size_t i = 0; i < count; ++i) quantize(i);
  }

  /// Copies frame `src_index` of `src` into slot `dst_index`; sizes must match.
  void copy_frame_from(const RenderOutput& src, std::size_t src_index, std::size_t dst_index) {
    const std::size_t px = pixels();
    std::copy_n(src.rgb.data() + src_index * px * 3, px * 3, rgb.data() + dst_index * px * 3);
    std::copy_n(src.linear_rgb.data() + src_index * px * 3, px * 3, linear_rgb.data() + dst_index * px * 3);
    std::copy_n(src.depth.data() + src_index * px, px, depth.data() + dst_index * px);
    std::copy_n(src.accum_alpha.data() + src_index * px, px, accum_alpha.data() + dst_index * px);
  }
};

}  // namespace splatgym
