// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/render/projection.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace splatgym {

/// Per-tile lists of indices into the projected array, front to back.
struct TileBins {
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::uint32_t> offsets;  // tiles_x * tiles_y + 1
  std::vector<std::uint32_t> entries;

  std::span<const std::uint32_t> tile(int tx, int ty) const {
    auto t = static_cast<std::size_t>(ty * tiles_x + tx);
    return {entries.data() + offsets[t], entries.data() + offsets[t + 1]};
  }
};

/// Scratch reused across sorts to avoid per-frame allocation.
struct SortScratch {
  std::vector<std::uint32_t> keys, keys_tmp, order, order_tmp;
};

/// Stable ascending sort of indices by a non-negative float key (LSD radix,
/// 4 x 8-bit passes). Equal keys keep input order.
inline void radix_sort_by_depth(std::span<const ProjectedGaussian> items, std::vector<std::uint32_t>& order,
                                SortScratch& s) {
  const std::size_t n = items.size();
  s.keys.resize(n);
  s.keys_tmp.resize(n);
  order.resize(n);
  s.order_tmp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Depths are > near > 0, so the IEEE bit pattern is order-preserving.
    s.keys[i] = std::bit_cast<std::uint32_t>(items[i].view_depth);
    order[i] = static_cast<std::uint32_t>(i);
  }
  std::uint32_t* kin = s.keys.data();
  std::uint32_t* kout = s.keys_tmp.data();
  std::uint32_t* oin = order.data();
  std::uint32_t* oout = s.order_tmp.data();
  for (int shift = 0; shift < 32; shift += 8) {
    std::size_t count[257] = {};
    for (std::size_t i = 0; i < n; ++i) ++count[((kin[i] >> shift) & 0xFFu) + 1];
    if (count[1] == n && shift > 0) continue;  // all digits zero: pass is a no-op
    for (int b = 0; b < 256; ++b) count[b + 1] += count[b];
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t dst = count[(kin[i] >> shift) & 0xFFu]++;
      kout[dst] = kin[i];
      oout[dst] = oin[i];
    }
    std::swap(kin, kout);
    std::swap(oin, oout);
  }
  if (oin != order.data()) std::copy(oin, oin + n, order.data());
}

/// Assigns every gaussian to each tile its footprint touches; each tile list is
/// sorted by view depth with ties broken by position in `projected`.
inline void bin_and_sort(std::span<const ProjectedGaussian> projected, int width, int height, TileBins& bins,
                         SortScratch& scratch) {
  bins.tiles_x = (width + kTileSize - 1) / kTileSize;
  bins.tiles_y = (height + kTileSize - 1) / kTileSize;
  const auto tiles = static_cast<std::size_t>(bins.tiles_x * bins.tiles_y);
  std::vector<std::uint32_t>& order = scratch.order;
  radix_sort_by_depth(projected, order, scratch);

  bins.offsets.assign(tiles + 1, 0);
  for (std::uint32_t i : order) {
    const auto& g = projected[i];
    for (int ty = g.tile_min_y; ty < g.tile_max_y; ++ty)
      for (int tx = g.tile_min_x; tx < g.tile_max_x; ++tx) ++bins.offsets[static_cast<std::size_t>(ty * bins.tiles_x + tx) + 1];
  }
  for (std::size_t t = 0; t < tiles; ++t) bins.offsets[t + 1] += bins.offsets[t];
  bins.entries.resize(bins.offsets[tiles]);
  std::vector<std::uint32_t> cursor(bins.offsets.begin(), bins.offsets.end() - 1);
  for (std::uint32_t i : order) {
    const auto& g = projected[i];
    for (int ty = g.tile_min_y; ty < g.tile_max_y; ++ty)
      for (int tx = g.tile_min_x; tx < g.tile_max_x; ++tx)
        bins.entries[cursor[static_cast<std::size_t>(ty * bins.tiles_x + tx)]++] = i;
  }
}

inline TileBins bin_and_sort(std::span<const ProjectedGaussian> projected, int width, int height) {
  TileBins bins;
  SortScratch scratch;
  bin_and_sort(projected, width, height, bins, scratch);
  return bins;
}

}  // namespace splatgym
