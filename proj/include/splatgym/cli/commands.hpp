// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/synth.hpp"
#include "splatgym/assets/validate.hpp"
#include "splatgym/engine/bench.hpp"
#include "splatgym/io/png.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace splatgym::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kIoFailed = 2 };

inline std::vector<std::shared_ptr<const GaussianSplatScene>> load_scenes(const std::filesystem::path& manifest) {
  std::vector<std::shared_ptr<const GaussianSplatScene>> out;
  for (const auto& src : load_manifest(manifest)) out.push_back(std::make_shared<GaussianSplatScene>(load_scene(src)));
  return out;
}

/// Validates every scene of a manifest. 0 = all pass, 1 = a check failed,
/// 2 = the manifest or an asset could not be read.
inline int cmd_validate(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err) {
  std::vector<SceneSource> sources;
  try {
    sources = load_manifest(manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailed;
  }
  bool ok = true;
  for (const auto& src : sources) {
    GaussianSplatScene scene;
    try {
      scene = load_scene(src);
    } catch (const std::exception& e) {
      err << "error: scene " << src.scene_id << ": " << e.what() << "\n";
      return kIoFailed;
    }
    const ValidationReport r = validate_scene(scene);
    print_report(out, r);
    ok = ok && r.passed();
  }
  return ok ? kOk : kValidationFailed;
}

struct RenderRequest {
  std::filesystem::path manifest;
  std::string scene_id;  // empty = first scene
  Vec3d eye = Vec3d(-2.0, 0.0, 1.0);
  Vec3d target = Vec3d::Zero();
  int width = 320;
  int height = 240;
  double hfov_deg = 90.0;
  int sh_degree = 0;
  int workers = default_worker_count();
  std::filesystem::path out_dir = ".";
};

struct RenderResult {
  double milliseconds = 0.0;
  float max_depth = 0.0f;
  std::filesystem::path rgb_path;
  std::filesystem::path depth_path;
};

/// Renders one view to rgb.png (8-bit) and depth.png (16-bit, depth / max_depth).
inline RenderResult render_to_png(std::shared_ptr<const GaussianSplatScene> scene, const RenderRequest& req) {
  if (!req.eye.allFinite() || !req.target.allFinite() || (req.target - req.eye).norm() < 1e-9)
    throw ConfigError("render: eye and target must be finite and distinct");
  SceneRegistry registry({std::move(scene)}, 1);
  RenderConfig cfg;
  cfg.width = req.width;
  cfg.height = req.height;
  cfg.sh_degree = req.sh_degree;
  CameraView cam{0, look_at(req.eye, req.target), Intrinsics::from_fov(req.width, req.height, req.hfov_deg * kPi / 180.0)};
  Renderer renderer(req.workers);
  RenderOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  renderer.render_batch(registry, std::span(&cam, 1), cfg, out);
  RenderResult res;
  res.milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t i = 0; i < out.pixels(); ++i)
    if (out.accum_alpha[i] > 0.0f) res.max_depth = std::max(res.max_depth, out.depth[i]);
  std::filesystem::create_directories(req.out_dir);
  res.rgb_path = req.out_dir / "rgb.png";
  res.depth_path = req.out_dir / "depth.png";
  write_png_rgb8(res.rgb_path.string(), req.width, req.height, out.rgb);
  write_png_gray16(res.depth_path.string(), req.width, req.height,
                   normalize_depth16(out.depth, out.accum_alpha, res.max_depth));
  return res;
}

inline int cmd_render(const RenderRequest& req, std::ostream& out, std::ostream& err) {
  std::shared_ptr<const GaussianSplatScene> scene;
  try {
    auto scenes = load_scenes(req.manifest);
    for (auto& s : scenes)
      if (req.scene_id.empty() || s->scene_id == req.scene_id) {
        scene = s;
        break;
      }
    if (!scene) {
      err << "error: scene '" << req.scene_id << "' not in manifest\n";
      return kIoFailed;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailed;
  }
  const RenderResult r = render_to_png(scene, req);
  out << "render_ms " << r.milliseconds << "\n"
      << "max_depth " << r.max_depth << "\n"
      << "wrote " << r.rgb_path.string() << " " << r.depth_path.string() << "\n";
  return kOk;
}

struct RolloutRequest {
  std::filesystem::path manifest;
  std::int64_t steps = 100;
  std::string policy = "follow";
  std::optional<std::filesystem::path> frames_dir;  // dumps env 0's frames when set
  EngineConfig overrides;
};

inline int cmd_rollout(const RolloutRequest& req, std::ostream& metrics_out, std::ostream& err) {
  std::vector<std::shared_ptr<const GaussianSplatScene>> scenes;
  try {
    scenes = load_scenes(req.manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailed;
  }
  VecEnv env(std::move(scenes), req.overrides);
  ScriptedPolicy policy(parse_policy(req.policy), env.size(), req.overrides.seed);
  MetricsWriter metrics(metrics_out);
  FrameCallback dump;
  if (req.frames_dir) {
    std::filesystem::create_directories(*req.frames_dir);
    dump = [&](const VecEnv& v, std::size_t e, std::int64_t k) {
      if (e != 0) return;
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06lld.png", static_cast<long long>(k));
      write_png_rgb8((*req.frames_dir / name).string(), v.frames().width, v.frames().height, v.frames().rgb_frame(0));
    };
  }
  const RolloutSummary sum = run_rollout(env, policy, req.steps, &metrics, std::nullopt, dump);
  err << "rollout: " << sum.steps << " steps x " << env.size() << " envs, frames(env0)=" << sum.frames_per_env[0]
      << ", faults=" << sum.faults << "\n";
  return kOk;
}

struct BenchRequest {
  std::filesystem::path manifest;
  std::vector<std::size_t> envs{1};
  std::vector<int> render_every{5};
  std::vector<int> workers{default_worker_count()};
  std::int64_t steps = 50;
  std::int64_t warmup = 5;
  EngineConfig base;
};

inline int cmd_bench(const BenchRequest& req, std::ostream& out, std::ostream& err) {
  std::vector<std::shared_ptr<const GaussianSplatScene>> scenes;
  try {
    scenes = load_scenes(req.manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailed;
  }
  for (std::size_t n : req.envs)
    for (int re : req.render_every)
      for (int w : req.workers) {
        EngineConfig cfg = req.base;
        cfg.n_envs = n;
        cfg.render_every = re;
        cfg.workers = w;
        out << run_bench(scenes, cfg, req.steps, req.warmup).to_json().dump() << "\n" << std::flush;
      }
  return kOk;
}

/// Writes the procedural room, flat and step scenes plus a manifest.
inline int cmd_synth(const std::filesystem::path& dir, std::size_t room_splats, std::uint64_t seed, std::ostream& out,
                     std::ostream& err) {
  try {
    const auto room = make_room_scene(room_splats, seed);
    const auto flat = make_flat_scene();
    const auto step = make_step_scene();
    const auto manifest = write_scene_bundle(dir, {&room, &flat, &step});
    out << "wrote " << manifest.string() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailed;
  }
  return kOk;
}

}  // namespace splatgym::cli
