#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "vatt/ior.hpp"
#include "vatt/metrics.hpp"
#include "vatt/plane.hpp"

namespace vatt {

/// Raised for scene scripts that cannot be rendered.
class InvalidScript : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ActorScript {
  Rgb color;
  int width = 6;
  int height = 8;
  std::vector<Point> waypoints;  // top-left corner positions
  std::vector<double> speeds;    // px/frame, one per segment
  std::optional<long> jump_frame;
  double jump_factor = 1.0;
  int edge_width = 0;  // pixels of raised-cosine falloff inside the box
};

struct BackgroundScript {
  Rgb base{0.45, 0.45, 0.45};
  double noise = 0.04;  // uniform amplitude per channel
};

struct SceneScript {
  std::uint64_t seed = 1;
  long frame_count = 100;
  int width = 86;
  int height = 64;
  BackgroundScript background;
  double min_contrast = 0.15;
  std::vector<ActorScript> actors;
};

/// Opacity of an actor pixel `i` columns (or rows) into a box of `extent`
/// pixels: a raised-cosine ramp over the outer `edge` pixels, 1 inside.
[[nodiscard]] inline double edge_taper(int i, int extent, int edge) {
  const int d = std::min(i, extent - 1 - i);
  if (d >= edge) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (d + 0.5) / edge);
}
/// Frames after a jump (in addition to the jump frame) labeled suspicious.
inline constexpr long kSuspiciousTail = 3;

inline void validate(const SceneScript& s) {
  if (s.width < 8 || s.height < 8) throw InvalidScript("scene must be at least 8x8");
  if (s.frame_count < 1) throw InvalidScript("frame_count must be >= 1");
  if (s.background.noise < 0.0 || s.background.noise > 0.5) {
    throw InvalidScript("background noise must lie in [0, 0.5]");
  }
  for (double c : {s.background.base.r, s.background.base.g, s.background.base.b}) {
    if (c < 0.0 || c > 1.0) throw InvalidScript("background base color outside [0,1]");
  }
  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const auto& a = s.actors[i];
    const std::string who = "actor " + std::to_string(i) + ": ";
    if (a.edge_width < 0) throw InvalidScript(who + "edge_width must be nonnegative");
    if (a.width < 2 * a.edge_width + 1 || a.height < 2 * a.edge_width + 1 || a.width < 3 || a.height < 3) {
      throw InvalidScript(who + "box too small for its soft edge (needs a solid core)");
    }
    if (a.waypoints.empty()) throw InvalidScript(who + "needs at least one waypoint");
    if (a.speeds.size() + 1 != a.waypoints.size()) {
      throw InvalidScript(who + "needs exactly one speed per path segment");
    }
    for (double v : a.speeds) {
      if (!(v >= 0.0)) throw InvalidScript(who + "speeds must be nonnegative");
    }
    for (const auto& w : a.waypoints) {
      if (w.x < 0.0 || w.y < 0.0 || w.x + a.width > s.width || w.y + a.height > s.height) {
        throw InvalidScript(who + "waypoint outside the frame");
      }
    }
    if (!(a.jump_factor >= 1.0)) throw InvalidScript(who + "jump_factor must be >= 1");
    if (a.jump_frame && (*a.jump_frame < 1 || *a.jump_frame >= s.frame_count)) {
      throw InvalidScript(who + "jump_frame outside the scene");
    }
    for (double c : {a.color.r, a.color.g, a.color.b}) {
      if (c < 0.0 || c > 1.0) throw InvalidScript(who + "color outside [0,1]");
    }
    const auto& base = s.background.base;
    const double contrast = std::max({std::abs(a.color.r - base.r), std::abs(a.color.g - base.g),
                                      std::abs(a.color.b - base.b)});
    // Core pixels against the worst-case noisy background pixel.
    if (contrast - s.background.noise < s.min_contrast) {
      throw InvalidScript(who + "color lacks the minimum contrast against the background");
    }
  }
}

namespace detail {

// 53-bit mantissa mapping; avoids the implementation-defined output of
// std::uniform_real_distribution so scenes are identical across toolchains.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<Point> trajectory(const ActorScript& a, long frame_count) {
  std::vector<Point> path;
  path.reserve(static_cast<std::size_t>(frame_count));
  Point pos = a.waypoints.front();
  std::size_t seg = 0;
  path.push_back(pos);
  for (long t = 1; t < frame_count; ++t) {
    double remaining = 0.0;
    if (seg < a.speeds.size()) {
      remaining = a.speeds[seg] * ((a.jump_frame && t >= *a.jump_frame) ? a.jump_factor : 1.0);
    }
    while (remaining > 0.0 && seg + 1 < a.waypoints.size()) {
      const Point target = a.waypoints[seg + 1];
      const double dx = target.x - pos.x;
      const double dy = target.y - pos.y;
      const double dist = std::hypot(dx, dy);
      if (dist <= remaining) {
        pos = target;
        remaining -= dist;
        ++seg;
      } else {
        pos = {pos.x + dx / dist * remaining, pos.y + dy / dist * remaining};
        remaining = 0.0;
      }
    }
    path.push_back(pos);
  }
  return path;
}

}  // namespace detail

/// Renders a scene frame by frame. Trajectories and the background texture
/// are fixed at construction; frames are independent of each other.
class SceneRenderer {
 public:
  explicit SceneRenderer(SceneScript script) : script_(std::move(script)) {
    validate(script_);
    background_ = Plane<Rgb>(script_.width, script_.height);
    std::mt19937_64 rng(script_.seed);
    const auto& base = script_.background.base;
    const double amp = script_.background.noise;
    for (auto& p : background_.values()) {
      auto jitter = [&] { return amp * (2.0 * detail::unit_uniform(rng) - 1.0); };
      p.r = std::clamp(base.r + jitter(), 0.0, 1.0);
      p.g = std::clamp(base.g + jitter(), 0.0, 1.0);
      p.b = std::clamp(base.b + jitter(), 0.0, 1.0);
    }
    for (const auto& a : script_.actors) paths_.push_back(detail::trajectory(a, script_.frame_count));
  }

  [[nodiscard]] const SceneScript& script() const noexcept { return script_; }
  [[nodiscard]] long frame_count() const noexcept { return script_.frame_count; }
  [[nodiscard]] const Plane<Rgb>& background() const noexcept { return background_; }

  [[nodiscard]] BoundingBox actor_box(std::size_t actor, long t) const {
    const auto& a = script_.actors[actor];
    const Point p = paths_[actor][static_cast<std::size_t>(t)];
    const int x0 = std::clamp(static_cast<int>(std::lround(p.x)), 0, script_.width - a.width);
    const int y0 = std::clamp(static_cast<int>(std::lround(p.y)), 0, script_.height - a.height);
    return {x0, y0, x0 + a.width - 1, y0 + a.height - 1};
  }

  [[nodiscard]] Frame frame(long t) const {
    check_index(t);
    Frame f{background_, t};
    for (std::size_t i = 0; i < script_.actors.size(); ++i) {
      const auto& a = script_.actors[i];
      const BoundingBox box = actor_box(i, t);
      for (int y = box.min_y; y <= box.max_y; ++y) {
        for (int x = box.min_x; x <= box.max_x; ++x) {
          const double k = edge_taper(x - box.min_x, a.width, a.edge_width) *
                           edge_taper(y - box.min_y, a.height, a.edge_width);
          Rgb& p = f.pixels(x, y);
          p = {k * a.color.r + (1.0 - k) * p.r, k * a.color.g + (1.0 - k) * p.g,
               k * a.color.b + (1.0 - k) * p.b};
        }
      }
    }
    return f;
  }

  [[nodiscard]] FrameTruth truth(long t) const {
    check_index(t);
    FrameTruth ft{t, {}, {}};
    for (std::size_t i = 0; i < script_.actors.size(); ++i) {
      const int id = static_cast<int>(i);
      ft.objects.push_back({id, actor_box(i, t)});
      const auto& jump = script_.actors[i].jump_frame;
      if (jump && t >= *jump && t <= *jump + kSuspiciousTail) ft.suspicious.push_back(id);
    }
    return ft;
  }

  [[nodiscard]] GroundTruth ground_truth() const {
    GroundTruth gt{script_.width, script_.height, {}};
    for (long t = 0; t < script_.frame_count; ++t) gt.frames.push_back(truth(t));
    return gt;
  }

 private:
  void check_index(long t) const {
    if (t < 0 || t >= script_.frame_count) throw InvalidInput("frame index outside the scene");
  }

  SceneScript script_;
  Plane<Rgb> background_;
  std::vector<std::vector<Point>> paths_;
};

struct RenderedScene {
  std::vector<Frame> frames;
  GroundTruth truth;
};

[[nodiscard]] inline RenderedScene render(const SceneScript& script) {
  SceneRenderer renderer(script);
  RenderedScene scene;
  scene.frames.reserve(static_cast<std::size_t>(script.frame_count));
  for (long t = 0; t < script.frame_count; ++t) scene.frames.push_back(renderer.frame(t));
  scene.truth = renderer.ground_truth();
  return scene;
}

}  // namespace vatt
