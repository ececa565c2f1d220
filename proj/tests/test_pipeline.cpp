#include <gtest/gtest.h>

#include "vatt/benchmark.hpp"
#include "vatt/pipeline.hpp"

using namespace vatt;

namespace {

Frame upscale(const Frame& f, int k) {
  Frame out{Plane<Rgb>(f.width() * k, f.height() * k), f.index};
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out.pixels(x, y) = f.pixels(x / k, y / k);
  }
  return out;
}

}  // namespace

TEST(PipelineTest, Deterministic) {
  const auto scene = render(localization_scene());
  Pipeline a(PipelineConfig{}), b(PipelineConfig{});
  for (long t = 0; t < 20; ++t) {
    const auto x = a.process(scene.frames[static_cast<std::size_t>(t)]);
    const auto y = b.process(scene.frames[static_cast<std::size_t>(t)]);
    EXPECT_EQ(x.saliency.values, y.saliency.values);
    ASSERT_EQ(x.regions.size(), y.regions.size());
    for (std::size_t i = 0; i < x.regions.size(); ++i) EXPECT_EQ(x.regions[i].pixels, y.regions[i].pixels);
    EXPECT_EQ(x.track_of, y.track_of);
  }
}

TEST(PipelineTest, RegionLimitAndPerDescriptorOutputs) {
  PipelineConfig c;
  c.ior.max_regions = 2;
  Pipeline p(c);
  const auto scene = render(benchmark_suite()[0]);
  for (const auto& f : scene.frames) {
    const auto r = p.process(f);
    EXPECT_LE(r.regions.size(), 2u);
    EXPECT_EQ(r.descriptors.size(), r.regions.size());
    EXPECT_EQ(r.assignments.size(), r.regions.size());
    EXPECT_EQ(r.track_of.size(), r.regions.size());
    EXPECT_GE(r.total_ms, r.bottom_up_ms);
  }
  EXPECT_LE(p.memory().size(), c.memory_capacity);
}

TEST(PipelineTest, LargerInputIsResizedAndTruthMapped) {
  const auto scene = render(localization_scene());
  const GroundTruth& gt = scene.truth;
  // Same scene at twice the resolution, with the truth boxes scaled along.
  GroundTruth big{gt.width * 2, gt.height * 2, {}};
  for (const auto& f : gt.frames) {
    FrameTruth g = f;
    for (auto& o : g.objects) o.box = {o.box.min_x * 2, o.box.min_y * 2, o.box.max_x * 2 + 1, o.box.max_y * 2 + 1};
    big.frames.push_back(g);
  }
  Pipeline small_p(PipelineConfig{}), big_p(PipelineConfig{});
  Evaluation small_e(&gt), big_e(&big);
  for (const auto& f : scene.frames) {
    const auto r = big_p.process(upscale(f, 2));
    EXPECT_EQ(r.working.width(), 86);
    EXPECT_EQ(r.working.height(), 64);
    big_e.add(r);
    small_e.add(small_p.process(f));
  }
  const auto a = small_e.report(), b = big_e.report();
  EXPECT_EQ(a.true_matches, b.true_matches);
  EXPECT_EQ(a.false_matches, b.false_matches);
  EXPECT_NEAR(a.mean_region_coverage, b.mean_region_coverage, 1e-9);
}

TEST(PipelineTest, TruthCoordinateMapping) {
  GroundTruth gt{172, 128, {}};
  const Point p = to_truth_coords({0, 0}, 86, 64, gt);
  EXPECT_DOUBLE_EQ(p.x, 0.5);
  EXPECT_DOUBLE_EQ(p.y, 0.5);
  const Point q = to_truth_coords({85, 63}, 86, 64, gt);
  EXPECT_DOUBLE_EQ(q.x, 170.5);
  gt.width = 86;
  gt.height = 64;
  EXPECT_EQ(to_truth_coords({3.25, 7}, 86, 64, gt), (Point{3.25, 7}));
}

TEST(PipelineTest, MotionNeedsTauFrames) {
  // First tau frames have no motion reference; motion appears afterwards.
  PipelineConfig c;
  c.channels.latency_tau = 2;
  c.fusion.weight_rg = c.fusion.weight_by = c.fusion.weight_i = 0.0;
  Pipeline p(c);
  const auto scene = render(localization_scene());
  for (long t = 0; t < 4; ++t) {
    const auto r = p.process(scene.frames[static_cast<std::size_t>(t)]);
    EXPECT_EQ(max_value(r.saliency.values) > 0.0, t >= 2) << t;
  }
}

TEST(PipelineTest, InvalidConfigRejected) {
  PipelineConfig c;
  c.memory_capacity = 0;
  EXPECT_THROW(Pipeline{c}, InvalidConfig);
  c = {};
  c.ior.alpha_far = 1.5;
  EXPECT_THROW(Pipeline{c}, InvalidConfig);
}

TEST(EvaluationTest, WithoutTruth) {
  Evaluation e;
  Pipeline p(PipelineConfig{});
  const auto scene = render(localization_scene());
  for (int t = 0; t < 5; ++t) e.add(p.process(scene.frames[static_cast<std::size_t>(t)]));
  const auto r = e.report();
  EXPECT_EQ(r.frames, 5);
  EXPECT_FALSE(r.match_score);
  EXPECT_GT(r.mean_region_coverage, 0.0);
  EXPECT_THROW((void)e.recall(), InvalidState);
}

TEST(EvaluationTest, BenchmarkSceneFindsTheJump) {
  const auto o = run_scene(benchmark_suite()[0], PipelineConfig{});
  EXPECT_EQ(o.recall.onsets, 1);
  EXPECT_EQ(o.recall.detected, 1);
  ASSERT_TRUE(o.report.match_score);
  EXPECT_GE(*o.report.match_score, 0.95);
  EXPECT_GT(o.opportunities, 50);
}
