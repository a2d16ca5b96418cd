// SPDX-License-Identifier: Apache-2.0
#include "splatgym/io/png.hpp"
#include "splatgym/render/reference.hpp"
#include "splatgym/render/renderer.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace splatgym;
using namespace splatgym::testing;

namespace {

SplatPrimitive splat_at(const Vec3f& p, float scale, float opacity, const Vec3f& rgb) {
  SplatPrimitive s;
  s.position = p;
  s.scale = Vec3f::Constant(scale);
  s.opacity = opacity;
  s.set_base_color(rgb);
  return s;
}

// Camera at the world origin looking down +Z (camera frame == world frame).
CameraView axis_camera(int w = 64, int h = 64, float f = 100.0f, std::size_t env = 0) {
  CameraView c;
  c.env = env;
  c.intrinsics.width = w;
  c.intrinsics.height = h;
  c.intrinsics.fx = c.intrinsics.fy = f;
  c.intrinsics.cx = 0.5f * static_cast<float>(w - 1);
  c.intrinsics.cy = 0.5f * static_cast<float>(h - 1);
  return c;
}

RenderConfig config_for(const CameraView& c) {
  RenderConfig cfg;
  cfg.width = c.intrinsics.width;
  cfg.height = c.intrinsics.height;
  return cfg;
}

RenderOutput render_one(const std::shared_ptr<GaussianSplatScene>& scene, const CameraView& cam,
                        const RenderConfig& cfg, int workers = 1) {
  SceneRegistry reg({scene}, cam.env + 1);
  Renderer r(workers);
  return r.render_batch(reg, std::span(&cam, 1), cfg);
}

float max_abs_diff(std::span<const float> a, std::span<const float> b) {
  float m = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Projection, OnAxisMeanIsPrincipalPoint) {
  CameraView cam;
  cam.intrinsics = Intrinsics{100, 100, 32, 32, 64, 64};
  auto g = project_gaussian(splat_at({0, 0, 5}, 0.05f, 0.5f, {1, 1, 1}), cam.world_from_camera, cam.intrinsics, 0.01f);
  ASSERT_TRUE(g);
  EXPECT_FLOAT_EQ(g->mean2d.x(), 32.0f);
  EXPECT_FLOAT_EQ(g->mean2d.y(), 32.0f);
  EXPECT_FLOAT_EQ(g->view_depth, 5.0f);
}

TEST(Projection, IsotropicCovariance) {
  const auto c = covariance_3d(Quatf::Identity(), Vec3f::Constant(0.2f));
  EXPECT_FLOAT_EQ(c[0], 0.04f);
  EXPECT_FLOAT_EQ(c[3], 0.04f);
  EXPECT_FLOAT_EQ(c[5], 0.04f);
  EXPECT_EQ(c[1], 0.0f);
  EXPECT_EQ(c[2], 0.0f);
  EXPECT_EQ(c[4], 0.0f);
}

TEST(Projection, CulledBehindNearPlaneAndOffscreen) {
  Intrinsics k{100, 100, 32, 32, 64, 64};
  EXPECT_FALSE(project_gaussian(splat_at({0, 0, -1}, 0.05f, 0.5f, {1, 1, 1}), Pose{}, k, 0.01f));
  EXPECT_FALSE(project_gaussian(splat_at({0, 0, 0.005f}, 0.05f, 0.5f, {1, 1, 1}), Pose{}, k, 0.01f));
  EXPECT_FALSE(project_gaussian(splat_at({50, 0, 1}, 0.01f, 0.5f, {1, 1, 1}), Pose{}, k, 0.01f));
  EXPECT_FALSE(project_gaussian(splat_at({0, 0, 5}, 0.05f, 0.0f, {1, 1, 1}), Pose{}, k, 0.01f));
}

TEST(Projection, CovarianceMatchesMonteCarlo) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const CameraView cam = random_camera(rng, 640, 480);
    // Mean inside the frustum, away from the edges so the slope clamp is inactive.
    const Vec3d dir_cam(0.3 * n01(rng) * 0.3, 0.3 * n01(rng) * 0.3, 1.0);
    const double z = 2.0 + trial * 0.1;
    const Vec3d p_world = cam.world_from_camera.apply(dir_cam.normalized() * z);
    SplatPrimitive s;
    s.position = p_world.cast<float>();
    s.rotation = random_rotation(rng);
    std::uniform_real_distribution<float> us(0.2f, 1.0f);
    s.scale = 0.02f * static_cast<float>(z) * Vec3f(us(rng), us(rng), us(rng));  // s/z <= 0.02
    s.opacity = 0.9f;
    auto g = project_gaussian(s, cam.world_from_camera, cam.intrinsics, 0.01f);
    ASSERT_TRUE(g);

    const Mat3d r = s.rotation.toRotationMatrix().cast<double>();
    const Pose cw = cam.world_from_camera.inverse();
    const auto& k = cam.intrinsics;
    const int samples = 100000;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d m2 = Eigen::Matrix2d::Zero();
    std::vector<Eigen::Vector2d> pts(samples);
    for (auto& q : pts) {
      const Vec3d local(s.scale.x() * n01(rng), s.scale.y() * n01(rng), s.scale.z() * n01(rng));
      const Vec3d pc = cw.apply(p_world + r * local);
      q = Eigen::Vector2d(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
      mean += q;
    }
    mean /= samples;
    for (const auto& q : pts) m2 += (q - mean) * (q - mean).transpose();
    m2 /= samples - 1;

    Eigen::Matrix2d ours;
    ours << g->cov2d[0] - kCovarianceRegularizer, g->cov2d[1], g->cov2d[1], g->cov2d[2] - kCovarianceRegularizer;
    const double rel = (ours - m2).norm() / m2.norm();
    EXPECT_LT(rel, 0.02) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 20);
}

TEST(Projection, FootprintCoversThreeSigma) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    auto cam = random_camera(rng, 64, 64);
    auto splats = random_splats(rng, 1, Vec3f::Zero(), 0.5f);
    auto g = project_gaussian(splats[0], cam.world_from_camera, cam.intrinsics, 0.01f);
    if (!g) continue;
    const float lmax = 0.5f * (g->cov2d[0] + g->cov2d[2]) +
                       std::sqrt(0.25f * (g->cov2d[0] - g->cov2d[2]) * (g->cov2d[0] - g->cov2d[2]) +
                                 g->cov2d[1] * g->cov2d[1]);
    EXPECT_GE(g->radius, 3.0f * std::sqrt(lmax));
    // Positive definite after regularization.
    EXPECT_GT(g->cov2d[0] * g->cov2d[2] - g->cov2d[1] * g->cov2d[1], 0.0f);
    EXPECT_GT(g->view_depth, 0.01f);
  }
}

TEST(Binning, FullImageGaussianInEveryTile) {
  CameraView cam = axis_camera(32, 32);
  std::vector<ProjectedGaussian> p;
  auto g = project_gaussian(splat_at({0, 0, 2}, 0.5f, 0.9f, {1, 1, 1}), cam.world_from_camera, cam.intrinsics, 0.01f);
  ASSERT_TRUE(g);
  p.push_back(*g);
  auto bins = bin_and_sort(p, 32, 32);
  ASSERT_EQ(bins.tiles_x * bins.tiles_y, 4);
  for (int ty = 0; ty < 2; ++ty)
    for (int tx = 0; tx < 2; ++tx) EXPECT_EQ(bins.tile(tx, ty).size(), 1u);
}

TEST(Binning, NearerFirst) {
  CameraView cam = axis_camera(32, 32);
  std::vector<ProjectedGaussian> p;
  p.push_back(*project_gaussian(splat_at({0, 0, 2}, 0.3f, 0.9f, {1, 0, 0}), Pose{}, cam.intrinsics, 0.01f));
  p.push_back(*project_gaussian(splat_at({0, 0, 1}, 0.15f, 0.9f, {0, 1, 0}), Pose{}, cam.intrinsics, 0.01f));
  auto bins = bin_and_sort(p, 32, 32);
  int shared = 0;
  for (int ty = 0; ty < bins.tiles_y; ++ty)
    for (int tx = 0; tx < bins.tiles_x; ++tx) {
      auto t = bins.tile(tx, ty);
      if (t.size() == 2) {
        ++shared;
        EXPECT_EQ(t[0], 1u);
      }
    }
  EXPECT_EQ(shared, 4);
}

TEST(Binning, MatchesExhaustiveIntersection) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto scene = splat_scene(random_splats(rng, 500, Vec3f::Zero(), 1.0f));
    auto cam = random_camera(rng, 80, 48);
    auto packed = PackedSplats::from(scene->splats);
    std::vector<ProjectedGaussian> p;
    Renderer::project_all(packed, cam, config_for(cam), p);
    auto bins = bin_and_sort(p, 80, 48);
    for (int ty = 0; ty < bins.tiles_y; ++ty)
      for (int tx = 0; tx < bins.tiles_x; ++tx) {
        // Oracle: the footprint square [mean - r, mean + r] meets the tile's
        // half-open pixel span; lists are then ordered by (depth, index).
        std::vector<std::uint32_t> expect;
        const float tx0 = static_cast<float>(tx * kTileSize), tx1 = static_cast<float>((tx + 1) * kTileSize);
        const float ty0 = static_cast<float>(ty * kTileSize), ty1 = static_cast<float>((ty + 1) * kTileSize);
        for (std::uint32_t i = 0; i < p.size(); ++i) {
          const float x0 = p[i].mean2d.x() - p[i].radius, x1 = p[i].mean2d.x() + p[i].radius;
          const float y0 = p[i].mean2d.y() - p[i].radius, y1 = p[i].mean2d.y() + p[i].radius;
          if (x1 >= tx0 && x0 < tx1 && y1 >= ty0 && y0 < ty1) expect.push_back(i);
        }
        std::stable_sort(expect.begin(), expect.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return p[a].view_depth < p[b].view_depth; });
        auto got = bins.tile(tx, ty);
        EXPECT_EQ(std::vector<std::uint32_t>(got.begin(), got.end()), expect);
      }
  }
}

TEST(Binning, RadixSortEqualsStableSort) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<float> u(0.01f, 50.0f);
  std::vector<ProjectedGaussian> items(5000);
  for (std::size_t i = 0; i < items.size(); ++i) items[i].view_depth = (i % 7 == 0) ? 3.0f : u(rng);  // ties
  std::vector<std::uint32_t> order;
  SortScratch scratch;
  radix_sort_by_depth(items, order, scratch);
  std::vector<std::uint32_t> expect(items.size());
  std::iota(expect.begin(), expect.end(), 0u);
  std::stable_sort(expect.begin(), expect.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return items[a].view_depth < items[b].view_depth; });
  EXPECT_EQ(order, expect);
}

TEST(Composite, EmptySceneIsBackground) {
  auto scene = splat_scene({});
  auto cam = axis_camera(20, 12);
  auto cfg = config_for(cam);
  cfg.background = Vec3f(0.2f, 0.4f, 0.6f);
  auto out = render_one(scene, cam, cfg);
  for (std::size_t p = 0; p < out.pixels(); ++p) {
    EXPECT_EQ(out.linear_rgb[p * 3 + 0], 0.2f);
    EXPECT_EQ(out.linear_rgb[p * 3 + 2], 0.6f);
    EXPECT_EQ(out.accum_alpha[p], 0.0f);
    EXPECT_EQ(out.depth[p], 0.0f);
  }
  auto ref = render_reference(*scene, cam, cfg);
  EXPECT_EQ(ref.linear_rgb, out.linear_rgb);
}

TEST(Composite, SingleGaussianAtMean) {
  auto cam = axis_camera(33, 33);  // principal point at pixel (16, 16)
  auto scene = splat_scene({splat_at({0, 0, 3}, 0.05f, 0.8f, {1.0f, 0.5f, 0.0f})});
  auto cfg = config_for(cam);
  cfg.background = Vec3f(0.0f, 0.0f, 1.0f);
  auto out = render_one(scene, cam, cfg);
  const std::size_t pix = 16 * 33 + 16;
  EXPECT_NEAR(out.accum_alpha[pix], 0.8f, 1e-6f);
  EXPECT_NEAR(out.linear_rgb[pix * 3 + 0], 0.8f * 1.0f, 1e-6f);
  EXPECT_NEAR(out.linear_rgb[pix * 3 + 1], 0.8f * 0.5f, 1e-6f);
  EXPECT_NEAR(out.linear_rgb[pix * 3 + 2], 0.2f * 1.0f, 1e-6f);
  EXPECT_NEAR(out.depth[pix], 3.0f, 1e-6f);
}

TEST(Composite, TwoLayerExpansion) {
  auto cam = axis_camera(33, 33);
  const Vec3f c1(1, 0, 0), c2(0, 1, 0), bg(0.1f, 0.1f, 0.1f);
  // Back gaussian listed first to exercise sorting.
  auto scene = splat_scene({splat_at({0, 0, 4}, 0.05f, 0.7f, c2), splat_at({0, 0, 2}, 0.02f, 0.6f, c1)});
  auto cfg = config_for(cam);
  cfg.background = bg;
  auto out = render_one(scene, cam, cfg);
  const std::size_t pix = 16 * 33 + 16;
  const float a1 = 0.6f, a2 = 0.7f;
  for (int ch = 0; ch < 3; ++ch) {
    const float expect = a1 * c1[ch] + (1 - a1) * a2 * c2[ch] + (1 - a1) * (1 - a2) * bg[ch];
    EXPECT_NEAR(out.linear_rgb[pix * 3 + static_cast<std::size_t>(ch)], expect, 1e-6f);
  }
  const float w1 = a1, w2 = (1 - a1) * a2;
  EXPECT_NEAR(out.depth[pix], (w1 * 2 + w2 * 4) / (w1 + w2), 1e-5f);
}

TEST(Composite, GoldenSingleSplat) {
  // tests/data/golden_single.png is written by gen_golden from the closed-form
  // single-gaussian image, independent of the renderer.
  const auto img = read_png(std::string(SPLATGYM_TEST_DATA) + "/golden_single.png");
  ASSERT_EQ(img.channels, 3);
  CameraView cam = axis_camera(img.width, img.height, 60.0f);
  SplatPrimitive s = splat_at({0.1f, -0.05f, 2.0f}, 0.08f, 0.9f, {0.9f, 0.3f, 0.1f});
  s.scale = Vec3f(0.12f, 0.05f, 0.05f);
  s.rotation = Quatf(Eigen::AngleAxisf(0.5f, Vec3f::UnitZ()));
  auto scene = splat_scene({s});
  auto cfg = config_for(cam);
  cfg.background = Vec3f(0.1f, 0.1f, 0.2f);
  auto out = render_one(scene, cam, cfg);
  ASSERT_EQ(out.rgb.size(), img.samples8.size());
  int worst = 0;
  for (std::size_t i = 0; i < out.rgb.size(); ++i)
    worst = std::max(worst, std::abs(static_cast<int>(out.rgb[i]) - static_cast<int>(img.samples8[i])));
  EXPECT_LE(worst, 1);
}

TEST(Render, MatchesReferenceOnRandomScenes) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 8; ++trial) {
    auto scene = splat_scene(random_splats(rng, 512, Vec3f::Zero(), 1.0f));
    auto cam = random_camera(rng, 48, 40);
    auto cfg = config_for(cam);
    cfg.background = Vec3f(0.3f, 0.2f, 0.1f);
    auto out = render_one(scene, cam, cfg);
    auto ref = render_reference(*scene, cam, cfg);
    EXPECT_LE(max_abs_diff(out.linear_rgb, ref.linear_rgb), 1e-5f) << trial;
    EXPECT_LE(max_abs_diff(out.accum_alpha, ref.accum_alpha), 1e-5f) << trial;
  }
}

TEST(Render, OutputInvariants) {
  std::mt19937_64 rng(77);
  auto splats = random_splats(rng, 800, Vec3f::Zero(), 1.0f);
  auto scene = splat_scene(splats);
  auto cam = random_camera(rng, 64, 48);
  auto out = render_one(scene, cam, config_for(cam));  // black background
  for (std::size_t p = 0; p < out.pixels(); ++p) {
    EXPECT_GE(out.accum_alpha[p], 0.0f);
    EXPECT_LE(out.accum_alpha[p], 1.0f);
    if (out.accum_alpha[p] > 0.0f) EXPECT_GE(out.depth[p], 0.0f);
    for (int ch = 0; ch < 3; ++ch) EXPECT_LE(out.linear_rgb[p * 3 + static_cast<std::size_t>(ch)], out.accum_alpha[p] + 1e-6f);
  }
}

TEST(Render, ZeroOpacityInsertionIsInvisible) {
  std::mt19937_64 rng(31);
  auto splats = random_splats(rng, 300, Vec3f::Zero(), 1.0f);
  auto cam = random_camera(rng, 48, 48);
  auto base = render_one(splat_scene(splats), cam, config_for(cam));
  std::uniform_int_distribution<std::size_t> at(0, splats.size());
  for (int k = 0; k < 20; ++k) {
    auto extra = random_splats(rng, 1, Vec3f::Zero(), 1.0f)[0];
    extra.opacity = 0.0f;
    splats.insert(splats.begin() + static_cast<std::ptrdiff_t>(at(rng)), extra);
  }
  auto with = render_one(splat_scene(splats), cam, config_for(cam));
  EXPECT_EQ(base.linear_rgb, with.linear_rgb);
  EXPECT_EQ(base.depth, with.depth);
}

TEST(Render, TranslationEquivariant) {
  std::mt19937_64 rng(32);
  auto splats = random_splats(rng, 400, Vec3f::Zero(), 1.0f);
  auto cam = random_camera(rng, 48, 48);
  auto base = render_one(splat_scene(splats), cam, config_for(cam));
  const Vec3f shift(3.0f, -2.0f, 1.5f);
  for (auto& s : splats) s.position += shift;
  cam.world_from_camera.translation += shift.cast<double>();
  auto moved = render_one(splat_scene(splats), cam, config_for(cam));
  EXPECT_LE(max_abs_diff(base.linear_rgb, moved.linear_rgb), 1e-5f);
}

TEST(Render, DepthPassDoesNotChangeColor) {
  std::mt19937_64 rng(33);
  auto scene = splat_scene(random_splats(rng, 2000, Vec3f::Zero(), 1.0f));
  auto cam = random_camera(rng, 64, 48);
  auto cfg = config_for(cam);
  auto with = render_one(scene, cam, cfg);
  cfg.with_depth = false;
  auto without = render_one(scene, cam, cfg);
  EXPECT_EQ(with.linear_rgb, without.linear_rgb);
  EXPECT_EQ(with.rgb, without.rgb);
  EXPECT_EQ(with.accum_alpha, without.accum_alpha);
  EXPECT_TRUE(std::all_of(without.depth.begin(), without.depth.end(), [](float d) { return d == 0.0f; }));
}

TEST(RenderBatch, EqualsLoopOfSinglesAcrossWorkerCounts) {
  std::mt19937_64 rng(40);
  auto a = splat_scene(random_splats(rng, 1000, Vec3f::Zero(), 1.0f), "a");
  auto b = splat_scene(random_splats(rng, 1000, Vec3f::Zero(), 1.0f), "b");
  SceneRegistry reg({a, b}, 64);
  std::vector<CameraView> cams;
  for (std::size_t e = 0; e < 64; ++e) cams.push_back(random_camera(rng, 32, 24, e));
  RenderConfig cfg;
  cfg.width = 32;
  cfg.height = 24;

  Renderer single(1);
  RenderOutput batch1 = single.render_batch(reg, cams, cfg);
  for (int workers : {2, 4}) {
    Renderer r(workers);
    RenderOutput bn = r.render_batch(reg, cams, cfg);
    EXPECT_EQ(bn.linear_rgb, batch1.linear_rgb) << workers;
    EXPECT_EQ(bn.depth, batch1.depth) << workers;
  }
  RenderOutput again = single.render_batch(reg, cams, cfg);
  EXPECT_EQ(again.rgb, batch1.rgb);

  Renderer fresh(1);
  for (std::size_t e = 0; e < cams.size(); ++e) {
    RenderOutput one = fresh.render_batch(reg, std::span(&cams[e], 1), cfg);
    ASSERT_TRUE(std::equal(one.linear_rgb.begin(), one.linear_rgb.end(), batch1.linear_frame(e).begin())) << e;
    ASSERT_TRUE(std::equal(one.depth.begin(), one.depth.end(), batch1.depth_frame(e).begin())) << e;
  }
}

TEST(RenderBatch, SharesSceneBuffers) {
  auto a = splat_scene(random_splats(*std::make_unique<std::mt19937_64>(1), 10, Vec3f::Zero(), 1.0f));
  SceneRegistry reg({a}, 8);
  Renderer r(1);
  const PackedSplats* p = &r.packed(reg.shared_scene(0));
  std::vector<CameraView> cams(8, axis_camera());
  for (std::size_t e = 0; e < 8; ++e) cams[e].env = e;
  r.render_batch(reg, cams, RenderConfig{});
  EXPECT_EQ(&r.packed(reg.shared_scene(0)), p);
}

TEST(RenderBatch, ErrorsAreReported) {
  auto a = splat_scene({});
  SceneRegistry reg({a}, 2);
  Renderer r(1);
  CameraView cam = axis_camera();
  cam.env = 5;
  EXPECT_THROW(r.render_batch(reg, std::span(&cam, 1), RenderConfig{}), ConfigError);
  cam.env = 0;
  RenderConfig wrong;
  wrong.width = 10;
  EXPECT_THROW(r.render_batch(reg, std::span(&cam, 1), wrong), ConfigError);
}
