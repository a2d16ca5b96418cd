// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/engine/vec_env.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace splatgym {

enum class PolicyKind { Zero, Follow, Random };

inline PolicyKind parse_policy(const std::string& name) {
  if (name == "zero") return PolicyKind::Zero;
  if (name == "follow") return PolicyKind::Follow;
  if (name == "random") return PolicyKind::Random;
  throw ConfigError("unknown policy '" + name + "' (expected zero, follow or random)");
}

/// Scripted policies. `Follow` drives the gait controller along the command:
/// the commanded velocity in velocity mode, a proportional approach in goal
/// mode. `Random` draws joint offsets uniformly from [-amplitude, amplitude]
/// with its own per-env generator.
class ScriptedPolicy {
 public:
  ScriptedPolicy(PolicyKind kind, std::size_t n_envs, std::uint64_t seed, double amplitude = 0.3)
      : kind_(kind), amplitude_(amplitude), rngs_(n_envs) {
    for (std::size_t e = 0; e < n_envs; ++e) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(e), 0xac7u};
      rngs_[e].seed(seq);
    }
  }

  PolicyKind kind() const { return kind_; }

  void act(const VecEnv& env, std::vector<float>& actions, std::vector<DriveCommand>& drives) {
    const std::size_t n = env.size(), j = env.num_joints();
    actions.assign(n * j, 0.0f);
    drives.assign(n, DriveCommand{});
    for (std::size_t e = 0; e < n; ++e) {
      if (kind_ == PolicyKind::Random) {
        std::uniform_real_distribution<float> u(static_cast<float>(-amplitude_), static_cast<float>(amplitude_));
        for (std::size_t k = 0; k < j; ++k) actions[e * j + k] = u(rngs_[e]);
      }
      if (kind_ == PolicyKind::Follow) drives[e] = follow(env.batch().robots[e], env.command(e));
    }
  }

  static DriveCommand follow(const RobotState& s, const Command& cmd) {
    if (cmd.mode == TaskMode::Velocity) return {cmd.lin_vel.x(), cmd.lin_vel.y(), cmd.yaw_rate};
    const double yaw = yaw_of(s.orientation);
    const Vec2d d = cmd.goal_xy - s.position.head<2>();
    Vec2d local(std::cos(yaw) * d.x() + std::sin(yaw) * d.y(), -std::sin(yaw) * d.x() + std::cos(yaw) * d.y());
    const double speed = local.norm();
    if (speed > 1.0) local /= speed;
    return {local.x(), local.y(), std::clamp(2.0 * wrap_angle(cmd.goal_yaw - yaw), -1.0, 1.0)};
  }

 private:
  PolicyKind kind_;
  double amplitude_;
  std::vector<std::mt19937_64> rngs_;
};

/// Newline-delimited JSON records: one object per line, flushed per step so
/// a partial run stays parseable.
class MetricsWriter {
 public:
  explicit MetricsWriter(std::ostream& out) : out_(out) {}

  void frame(std::size_t env, std::int64_t step, std::int64_t episode_step) {
    emit({{"type", "frame"}, {"env", env}, {"step", step}, {"episode_step", episode_step}});
  }

  void step(const VecEnv& vec, std::size_t env, std::int64_t step) {
    const RobotState& s = vec.batch().robots[env];
    const RewardBreakdown& r = vec.reward_breakdown(env);
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& t : r.terms) terms[std::string(t.name)] = t.value;
    nlohmann::json rec = {{"type", "step"},
                          {"env", env},
                          {"step", step},
                          {"episode", vec.episode_index(env)},
                          {"status", to_string(vec.last_status(env))},
                          {"reward", r.total},
                          {"terms", terms}};
    // After an auto-reset the state belongs to the new episode; report the
    // pre-reset outcome only through status and reward.
    if (vec.dones()[env] == 0) {
      rec["base"] = {s.position.x(), s.position.y(), s.position.z()};
      rec["tilt"] = s.tilt;
    }
    emit(rec);
  }

  void fault(std::size_t env, std::int64_t step) {
    emit({{"type", "fault"}, {"env", env}, {"step", step}, {"action", "reset"}});
  }

  void flush() { out_.flush(); }
  std::size_t records() const { return records_; }

 private:
  void emit(const nlohmann::json& j) {
    out_ << j.dump() << '\n';
    ++records_;
  }

  std::ostream& out_;
  std::size_t records_ = 0;
};

struct RolloutSummary {
  std::int64_t steps = 0;
  std::vector<std::int64_t> frames_per_env;
  std::vector<double> return_per_env;
  std::int64_t faults = 0;
  std::int64_t episodes_finished = 0;
};

/// Called with (env, observation index) for every freshly rendered frame.
using FrameCallback = std::function<void(const VecEnv&, std::size_t, std::int64_t)>;

/// Runs `steps` control steps from a fresh reset. A frame record is written
/// for every observation index k < steps whose image was rendered for k.
inline RolloutSummary run_rollout(VecEnv& env, ScriptedPolicy& policy, std::int64_t steps, MetricsWriter* metrics,
                                  std::optional<std::uint64_t> seed = std::nullopt,
                                  const FrameCallback& on_frame = {}) {
  RolloutSummary sum;
  sum.frames_per_env.assign(env.size(), 0);
  sum.return_per_env.assign(env.size(), 0.0);
  env.reset(seed);
  std::vector<float> actions;
  std::vector<DriveCommand> drives;
  for (std::int64_t k = 0; k < steps; ++k) {
    for (std::size_t e = 0; e < env.size(); ++e)
      if (env.rendered()[e]) {
        ++sum.frames_per_env[e];
        if (metrics) metrics->frame(e, k, env.batch().steps[e]);
        if (on_frame) on_frame(env, e, k);
      }
    policy.act(env, actions, drives);
    env.set_drive(drives);
    env.step(actions);
    for (std::size_t e = 0; e < env.size(); ++e) {
      sum.return_per_env[e] += env.reward_breakdown(e).total;
      if (env.dones()[e]) ++sum.episodes_finished;
      if (env.last_fault(e)) ++sum.faults;
      if (metrics) {
        metrics->step(env, e, k);
        if (env.last_fault(e)) metrics->fault(e, k);
      }
    }
    if (metrics) metrics->flush();
    ++sum.steps;
  }
  return sum;
}

}  // namespace splatgym
