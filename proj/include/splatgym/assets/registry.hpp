// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/assets/scene.hpp"
#include "splatgym/core/error.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace splatgym {

/// Immutable set of scenes plus a round-robin environment -> scene map.
/// Scenes are shared by pointer; no environment owns a copy.
class SceneRegistry {
 public:
  SceneRegistry(std::vector<std::shared_ptr<const GaussianSplatScene>> scenes, std::size_t n_envs)
      : scenes_(std::move(scenes)), assignment_(n_envs) {
    if (scenes_.empty()) throw ConfigError("register_scenes: at least one scene is required");
    if (n_envs == 0) throw ConfigError("register_scenes: n_envs must be >= 1");
    for (const auto& s : scenes_)
      if (!s) throw ConfigError("register_scenes: null scene");
    for (std::size_t e = 0; e < n_envs; ++e) assignment_[e] = e % scenes_.size();
  }

  std::size_t scene_count() const { return scenes_.size(); }
  std::size_t env_count() const { return assignment_.size(); }
  std::size_t scene_index(std::size_t env) const {
    if (env >= assignment_.size()) throw ConfigError("environment " + std::to_string(env) + " is not registered");
    return assignment_[env];
  }
  const GaussianSplatScene& scene(std::size_t index) const { return *scenes_.at(index); }
  const GaussianSplatScene& scene_for_env(std::size_t env) const { return *scenes_[scene_index(env)]; }
  const std::shared_ptr<const GaussianSplatScene>& shared_scene(std::size_t index) const { return scenes_.at(index); }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

 private:
  std::vector<std::shared_ptr<const GaussianSplatScene>> scenes_;
  std::vector<std::size_t> assignment_;
};

inline SceneRegistry register_scenes(std::vector<std::shared_ptr<const GaussianSplatScene>> scenes, std::size_t n_envs) {
  return SceneRegistry(std::move(scenes), n_envs);
}

}  // namespace splatgym
