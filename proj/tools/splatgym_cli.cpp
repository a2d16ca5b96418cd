// SPDX-License-Identifier: Apache-2.0
#include "splatgym/cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace splatgym;

namespace {

void add_engine_flags(CLI::App* cmd, EngineConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "Engine config JSON (flags below override it)");
  cmd->add_option("--envs", cfg.n_envs, "Number of environments");
  cmd->add_option("--render-every", cfg.render_every, "Render every k-th control step");
  cmd->add_option("--blur-k", cfg.camera.blur_k, "Motion blur samples per frame");
  cmd->add_option("--workers", cfg.workers, "Worker threads");
  cmd->add_option("--seed", cfg.seed, "Random seed");
  cmd->add_option("--width", cfg.camera.width, "Image width");
  cmd->add_option("--height", cfg.camera.height, "Image height");
}

/// Loads the config file, then re-applies the flags that were given explicitly.
EngineConfig resolve_config(CLI::App* cmd, const EngineConfig& flags, const std::string& config_path) {
  if (config_path.empty()) return flags;
  EngineConfig cfg = load_engine_config(config_path);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--envs")) cfg.n_envs = flags.n_envs;
  if (given("--render-every")) cfg.render_every = flags.render_every;
  if (given("--blur-k")) cfg.camera.blur_k = flags.camera.blur_k;
  if (given("--workers")) cfg.workers = flags.workers;
  if (given("--seed")) cfg.seed = flags.seed;
  if (given("--width")) cfg.camera.width = flags.camera.width;
  if (given("--height")) cfg.camera.height = flags.camera.height;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splatgym: batched gaussian-splat robot simulation"};
  app.require_subcommand(1);

  std::string manifest;

  auto* validate = app.add_subcommand("validate", "Check every scene of a manifest");
  validate->add_option("--manifest", manifest, "Scene manifest JSON")->required();

  cli::RenderRequest render_req;
  std::vector<double> eye, target;
  auto* render = app.add_subcommand("render", "Render one view to rgb.png and depth.png");
  render->add_option("--manifest", manifest, "Scene manifest JSON")->required();
  render->add_option("--scene", render_req.scene_id, "Scene id (default: first)");
  render->add_option("--eye", eye, "Camera position x y z")->expected(3);
  render->add_option("--target", target, "Look-at point x y z")->expected(3);
  render->add_option("--width", render_req.width, "Image width")->check(CLI::PositiveNumber);
  render->add_option("--height", render_req.height, "Image height")->check(CLI::PositiveNumber);
  render->add_option("--hfov", render_req.hfov_deg, "Horizontal field of view, degrees")->check(CLI::Range(1.0, 179.0));
  render->add_option("--sh-degree", render_req.sh_degree, "Spherical harmonic degree")->check(CLI::Range(0, 3));
  render->add_option("--workers", render_req.workers, "Worker threads")->check(CLI::PositiveNumber);
  render->add_option("--out", render_req.out_dir, "Output directory");

  cli::RolloutRequest rollout_req;
  std::string rollout_config, metrics_path = "-", frames_dir;
  auto* rollout = app.add_subcommand("rollout", "Run a scripted-policy rollout and stream metrics");
  rollout->add_option("--manifest", manifest, "Scene manifest JSON")->required();
  rollout->add_option("--steps", rollout_req.steps, "Control steps")->check(CLI::NonNegativeNumber);
  rollout->add_option("--policy", rollout_req.policy, "zero | follow | random");
  rollout->add_option("--out", metrics_path, "Metrics NDJSON path ('-' = stdout)");
  rollout->add_option("--frames", frames_dir, "Directory for env 0 frame PNGs");
  add_engine_flags(rollout, rollout_req.overrides, rollout_config);

  cli::BenchRequest bench_req;
  std::string bench_config, bench_out = "-";
  auto* bench = app.add_subcommand("bench", "Throughput sweep; one JSON record per point");
  bench->add_option("--manifest", manifest, "Scene manifest JSON")->required();
  bench->add_option("--config", bench_config, "Engine config JSON");
  bench->add_option("--envs", bench_req.envs, "Env counts to sweep");
  bench->add_option("--render-every", bench_req.render_every, "Render intervals to sweep");
  bench->add_option("--workers", bench_req.workers, "Worker counts to sweep");
  bench->add_option("--steps", bench_req.steps, "Timed control steps per point");
  bench->add_option("--warmup", bench_req.warmup, "Untimed warm-up steps per point");
  bench->add_option("--blur-k", bench_req.base.camera.blur_k, "Motion blur samples");
  bench->add_option("--seed", bench_req.base.seed, "Random seed");
  bench->add_option("--width", bench_req.base.camera.width, "Image width");
  bench->add_option("--height", bench_req.base.camera.height, "Image height");
  bench->add_option("--out", bench_out, "Report path ('-' = stdout)");

  std::string synth_dir;
  std::size_t synth_splats = 120000;
  std::uint64_t synth_seed = 7;
  auto* synth = app.add_subcommand("synth", "Write procedural test scenes and a manifest");
  synth->add_option("--out", synth_dir, "Output directory")->required();
  synth->add_option("--splats", synth_splats, "Room splat count");
  synth->add_option("--seed", synth_seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cli::cmd_validate(manifest, std::cout, std::cerr);

    if (*render) {
      if (!eye.empty()) render_req.eye = Vec3d(eye[0], eye[1], eye[2]);
      if (!target.empty()) render_req.target = Vec3d(target[0], target[1], target[2]);
      if (!render_req.eye.allFinite() || !render_req.target.allFinite() ||
          (render_req.eye - render_req.target).norm() < 1e-9) {
        std::cerr << "usage error: --eye and --target must be finite and distinct\n";
        return app.exit(CLI::ValidationError("--eye/--target", "invalid camera pose"));
      }
      render_req.manifest = manifest;
      return cli::cmd_render(render_req, std::cout, std::cerr);
    }

    if (*rollout) {
      rollout_req.manifest = manifest;
      rollout_req.overrides = resolve_config(rollout, rollout_req.overrides, rollout_config);
      if (!frames_dir.empty()) rollout_req.frames_dir = frames_dir;
      if (metrics_path == "-") return cli::cmd_rollout(rollout_req, std::cout, std::cerr);
      std::ofstream out(metrics_path);
      if (!out) {
        std::cerr << "error: cannot write '" << metrics_path << "'\n";
        return cli::kIoFailed;
      }
      return cli::cmd_rollout(rollout_req, out, std::cerr);
    }

    if (*bench) {
      bench_req.manifest = manifest;
      if (!bench_config.empty()) {
        EngineConfig flags = bench_req.base;
        bench_req.base = load_engine_config(bench_config);
        if (bench->count("--blur-k")) bench_req.base.camera.blur_k = flags.camera.blur_k;
        if (bench->count("--seed")) bench_req.base.seed = flags.seed;
        if (bench->count("--width")) bench_req.base.camera.width = flags.camera.width;
        if (bench->count("--height")) bench_req.base.camera.height = flags.camera.height;
      }
      if (bench_out == "-") return cli::cmd_bench(bench_req, std::cout, std::cerr);
      std::ofstream out(bench_out);
      if (!out) {
        std::cerr << "error: cannot write '" << bench_out << "'\n";
        return cli::kIoFailed;
      }
      return cli::cmd_bench(bench_req, out, std::cerr);
    }

    if (*synth) return cli::cmd_synth(synth_dir, synth_splats, synth_seed, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kValidationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kIoFailed;
  }
  return cli::kOk;
}
