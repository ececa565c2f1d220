#pragma once

#include <vector>

#include "vatt/pipeline.hpp"
#include "vatt/synthgen.hpp"

namespace vatt {

/// Bundled surveillance scenes at the 86 x 64 working size. Four walkers per
/// scene in separate lanes; one of them breaks into a run partway through.
/// Each clip ends before its runner reaches the end of the path, so no
/// actor ever stops on screen.
[[nodiscard]] inline std::vector<SceneScript> benchmark_suite() {
  const Rgb red{0.85, 0.15, 0.15};
  const Rgb green{0.15, 0.85, 0.15};
  const Rgb blue{0.15, 0.15, 0.85};
  const Rgb yellow{0.85, 0.85, 0.15};
  const Rgb cyan{0.15, 0.85, 0.85};
  const Rgb magenta{0.85, 0.15, 0.85};
  const Rgb maroon{0.45, 0.08, 0.08};
  const Rgb forest{0.08, 0.40, 0.10};
  const Rgb navy{0.08, 0.10, 0.45};

  constexpr double lane[] = {6, 21, 36, 51};
  auto walker = [&](Rgb c, int l, bool rightward, double speed) {
    const Point a{2, lane[l]}, b{81, lane[l]};
    return ActorScript{c, 5, 7, {rightward ? a : b, rightward ? b : a}, {speed}, std::nullopt, 1.0};
  };
  auto runner = [&](Rgb c, int l, bool rightward, double speed, long jump, double factor) {
    ActorScript a = walker(c, l, rightward, speed);
    a.jump_frame = jump;
    a.jump_factor = factor;
    return a;
  };
  // The clip runs until the first frame in which some actor would reach the
  // end of its path.
  auto scene = [](std::uint64_t seed, std::vector<ActorScript> actors) {
    SceneScript s;
    s.seed = seed;
    s.background.noise = 0.015;
    s.actors = std::move(actors);
    s.frame_count = 1000;
    for (const auto& a : s.actors) {
      const auto path = detail::trajectory(a, s.frame_count);
      const Point end = a.waypoints.back();
      for (long t = 1; t < s.frame_count; ++t) {
        if (path[static_cast<std::size_t>(t)].x == end.x && path[static_cast<std::size_t>(t)].y == end.y) {
          s.frame_count = t;
          break;
        }
      }
    }
    return s;
  };

  return {
      scene(11,
            {walker(maroon, 0, false, 1.0), runner(red, 1, true, 1.0, 16, 8.0), walker(forest, 2, true, 1.0),
             walker(navy, 3, false, 1.0)}),
      scene(23,
            {walker(yellow, 0, true, 1.0), walker(maroon, 1, false, 1.0), runner(green, 2, false, 1.0, 14, 8.0),
             walker(navy, 3, true, 1.0)}),
      scene(37,
            {walker(maroon, 0, false, 1.0), walker(forest, 1, true, 1.0), walker(navy, 2, false, 1.0),
             runner(blue, 3, true, 1.0, 12, 8.0)}),
      scene(41,
            {walker(green, 0, true, 1.0), runner(yellow, 1, false, 1.0, 20, 8.0), walker(forest, 2, true, 1.0),
             walker(navy, 3, false, 1.0)}),
      scene(59,
            {walker(cyan, 0, false, 1.0), walker(maroon, 1, true, 1.0), runner(magenta, 2, true, 1.0, 14, 8.0),
             walker(navy, 3, false, 1.0)}),
  };
}

/// Single high-contrast walker crossing the frame.
[[nodiscard]] inline SceneScript localization_scene() {
  SceneScript s;
  s.seed = 7;
  s.frame_count = 50;
  s.background.noise = 0.015;
  s.actors.push_back({{0.90, 0.10, 0.10}, 5, 7, {{8, 20}, {78, 34}}, {1.2}, std::nullopt, 1.0});
  return s;
}

struct SceneOutcome {
  EvalReport report;
  RecallTally recall;
  long opportunities = 0;
};

/// Render `script` frame by frame through a fresh pipeline and score it.
[[nodiscard]] inline SceneOutcome run_scene(const SceneScript& script, const PipelineConfig& config) {
  SceneRenderer renderer(script);
  const GroundTruth truth = renderer.ground_truth();
  Pipeline pipeline(config);
  Evaluation eval(&truth);
  for (long t = 0; t < renderer.frame_count(); ++t) eval.add(pipeline.process(renderer.frame(t)));
  return {eval.report(), eval.recall(), match_opportunities(truth)};
}

struct SuiteOutcome {
  std::vector<SceneOutcome> scenes;
  long true_matches = 0;
  long false_matches = 0;
  long flagged = 0;
  long false_alerts = 0;
  long onsets = 0;
  long detected = 0;
  long opportunities = 0;
  double mean_coverage = 0.0;      // mean over frames of all scenes
  double mean_bottom_up_ms = 0.0;  // mean over frames of all scenes
  double mean_total_ms = 0.0;

  [[nodiscard]] std::optional<double> match_score() const { return vatt::match_score(true_matches, false_matches); }
  [[nodiscard]] double false_alert_rate() const { return vatt::false_alert_rate(false_alerts, flagged); }
};

[[nodiscard]] inline SuiteOutcome run_suite(const std::vector<SceneScript>& scenes, const PipelineConfig& config) {
  SuiteOutcome s;
  long frames = 0;
  for (const auto& script : scenes) {
    auto o = run_scene(script, config);
    const auto& r = o.report;
    s.true_matches += r.true_matches;
    s.false_matches += r.false_matches;
    s.flagged += r.n_suspicious_flagged;
    s.false_alerts += r.n_false_alerts;
    s.onsets += o.recall.onsets;
    s.detected += o.recall.detected;
    s.opportunities += o.opportunities;
    s.mean_coverage += r.mean_region_coverage * static_cast<double>(r.frames);
    s.mean_bottom_up_ms += r.mean_bottom_up_ms * static_cast<double>(r.frames);
    s.mean_total_ms += r.mean_total_ms * static_cast<double>(r.frames);
    frames += r.frames;
    s.scenes.push_back(std::move(o));
  }
  if (frames > 0) {
    s.mean_coverage /= static_cast<double>(frames);
    s.mean_bottom_up_ms /= static_cast<double>(frames);
    s.mean_total_ms /= static_cast<double>(frames);
  }
  return s;
}

}  // namespace vatt
