// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/registry.hpp"
#include "splatgym/core/parallel.hpp"
#include "splatgym/render/binning.hpp"
#include "splatgym/render/camera.hpp"
#include "splatgym/render/composite.hpp"
#include "splatgym/render/projection.hpp"
#include "splatgym/render/render_output.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace splatgym {

struct RenderConfig {
  int width = 64;
  int height = 64;
  float near_plane = 0.01f;
  Vec3f background = Vec3f::Zero();
  int sh_degree = 0;  // 0 = DC color only
  bool with_depth = true;
};

/// Accumulated wall-clock time per pipeline phase.
struct RenderStats {
  double project_s = 0.0;
  double sort_s = 0.0;
  double composite_s = 0.0;
  std::size_t frames = 0;

  double total_s() const { return project_s + sort_s + composite_s; }
};

/// Batched tile rasterizer. Cameras are processed in groups; within a group,
/// projection and binning run one work item per camera, compositing one work
/// item per (camera, tile). Tiles write disjoint pixels, so the output does
/// not depend on the worker count.
class Renderer {
 public:
  explicit Renderer(int workers = default_worker_count()) : pool_(workers) {}

  int workers() const { return pool_.workers(); }
  const RenderStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  /// Render-ready data for a scene, built on first use and kept while the
  /// renderer lives.
  const PackedSplats& packed(const std::shared_ptr<const GaussianSplatScene>& scene) {
    auto it = cache_.find(scene.get());
    if (it == cache_.end()) {
      Entry e;
      e.owner = scene;
      e.packed = PackedSplats::from(scene->splats);
      e.packed.source = std::shared_ptr<const std::vector<SplatPrimitive>>(scene, &scene->splats);
      it = cache_.emplace(scene.get(), std::move(e)).first;
    }
    return it->second.packed;
  }

  /// Renders every camera into `out` (resized to cameras.size() frames).
  void render_batch(const SceneRegistry& registry, std::span<const CameraView> cameras, const RenderConfig& config,
                    RenderOutput& out) {
    out.resize(cameras.size(), config.height, config.width);
    std::vector<const PackedSplats*> scenes(cameras.size());
    for (std::size_t i = 0; i < cameras.size(); ++i) {
      const CameraView& cam = cameras[i];
      if (cam.intrinsics.width != config.width || cam.intrinsics.height != config.height)
        throw ConfigError("render_batch: camera image size differs from render config");
      cam.intrinsics.validate();
      scenes[i] = &packed(registry.shared_scene(registry.scene_index(cam.env)));
    }

    const std::size_t group = std::max<std::size_t>(4, 2 * static_cast<std::size_t>(pool_.workers()));
    if (work_.size() < group) work_.resize(group);
    const int tiles_x = (config.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (config.height + kTileSize - 1) / kTileSize;
    const auto tiles = static_cast<std::size_t>(tiles_x * tiles_y);

    using clock = std::chrono::steady_clock;
    for (std::size_t base = 0; base < cameras.size(); base += group) {
      const std::size_t n = std::min(group, cameras.size() - base);

      auto t0 = clock::now();
      pool_.parallel_for(n, [&](std::size_t j) {
        project_all(*scenes[base + j], cameras[base + j], config, work_[j].projected);
      });
      auto t1 = clock::now();
      pool_.parallel_for(n, [&](std::size_t j) {
        bin_and_sort(work_[j].projected, config.width, config.height, work_[j].bins, work_[j].scratch);
      });
      auto t2 = clock::now();
      pool_.parallel_for(n * tiles, [&](std::size_t item) {
        const std::size_t j = item / tiles;
        const auto t = static_cast<int>(item % tiles);
        const int tx = t % tiles_x, ty = t / tiles_x;
        TileRect rect{tx * kTileSize, ty * kTileSize, std::min((tx + 1) * kTileSize, config.width),
                      std::min((ty + 1) * kTileSize, config.height)};
        composite_tile(work_[j].projected, work_[j].bins.tile(tx, ty), rect, config.background,
                       out.frame(base + j), config.with_depth);
      });
      auto t3 = clock::now();
      stats_.project_s += std::chrono::duration<double>(t1 - t0).count();
      stats_.sort_s += std::chrono::duration<double>(t2 - t1).count();
      stats_.composite_s += std::chrono::duration<double>(t3 - t2).count();
    }
    pool_.parallel_for(cameras.size(), [&](std::size_t i) { out.quantize(i); });
    stats_.frames += cameras.size();
  }

  RenderOutput render_batch(const SceneRegistry& registry, std::span<const CameraView> cameras,
                            const RenderConfig& config) {
    RenderOutput out;
    render_batch(registry, cameras, config, out);
    return out;
  }

  /// Projects every splat of a scene for one camera, in splat order, dropping culled ones.
  static void project_all(const PackedSplats& splats, const CameraView& cam, const RenderConfig& config,
                          std::vector<ProjectedGaussian>& out) {
    out.clear();
    const ViewTransform view = ViewTransform::from(cam.world_from_camera);
    for (std::size_t i = 0; i < splats.size(); ++i) {
      const Vec3f color = config.sh_degree > 0 ? splat_color(splats, i, config.sh_degree, view.camera_center)
                                               : splats.color[i];
      auto g = project_gaussian(splats.position[i], splats.covariance[i], color, splats.opacity[i], view,
                                cam.intrinsics, config.near_plane);
      if (!g) continue;
      g->index = static_cast<std::uint32_t>(i);
      out.push_back(*g);
    }
  }

 private:
  struct Entry {
    std::shared_ptr<const GaussianSplatScene> owner;
    PackedSplats packed;
  };
  struct CameraWork {
    std::vector<ProjectedGaussian> projected;
    TileBins bins;
    SortScratch scratch;
  };

  WorkerPool pool_;
  std::map<const GaussianSplatScene*, Entry> cache_;
  std::vector<CameraWork> work_;
  RenderStats stats_;
};

}  // namespace splatgym
