#pragma once

#include <chrono>
#include <deque>
#include <optional>
#include <vector>

#include "vatt/channels.hpp"
#include "vatt/descriptors.hpp"
#include "vatt/ior.hpp"
#include "vatt/metrics.hpp"
#include "vatt/spectral.hpp"
#include "vatt/tracker.hpp"

namespace vatt {

struct PipelineConfig {
  ChannelConfig channels;
  FusionConfig fusion;
  IorConfig ior;
  MatchConfig match;
  std::size_t memory_capacity = 1000;

  void validate() const {
    channels.validate();
    fusion.validate();
    ior.validate();
    match.validate();
    if (memory_capacity == 0) throw InvalidConfig("memory_capacity must be positive");
  }
};

struct FrameResult {
  Frame working;
  SaliencyMap saliency;
  std::vector<Region> regions;
  std::vector<RegionDescriptor> descriptors;
  std::vector<Assignment> assignments;
  std::vector<TrackId> track_of;
  std::vector<SuspicionEvent> events;
  double bottom_up_ms = 0.0;
  double total_ms = 0.0;

  [[nodiscard]] std::size_t region_area() const {
    std::size_t n = 0;
    for (const auto& r : regions) n += r.size();
    return n;
  }
};

/// Per-stream driver: resize, channels, saliency, inhibition of return,
/// description, matching. Frames must be fed in order.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config) : config_(config), memory_(config.memory_capacity) {
    config_.validate();
  }

  [[nodiscard]] const PipelineConfig& config() const noexcept { return config_; }
  [[nodiscard]] const TrackMemory& memory() const noexcept { return memory_; }

  FrameResult process(const Frame& input) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    FrameResult out;

    out.working = resize_frame(input, config_.channels);
    ChannelSet channels = history_.size() == static_cast<std::size_t>(config_.channels.latency_tau)
                              ? decompose(out.working, history_.front(), config_.channels)
                              : decompose(out.working, config_.channels);
    history_.push_back(channels.intensity);
    if (history_.size() > static_cast<std::size_t>(config_.channels.latency_tau)) history_.pop_front();

    out.saliency = fuse(channels, config_.fusion, input.index);
    IorConfig ior = config_.ior;
    ior.max_region_px = scaled_region_limit(ior.max_region_px, out.working.width() * out.working.height());
    out.regions = extract_regions(out.saliency, ior);
    const auto bottom_up_end = clock::now();

    out.descriptors.reserve(out.regions.size());
    for (const auto& r : out.regions) out.descriptors.push_back(describe(r, out.working));
    out.assignments = memory_.assign(out.descriptors, config_.match);
    auto update = memory_.update(out.descriptors, out.assignments, input.index, config_.match);
    out.events = std::move(update.events);
    out.track_of = std::move(update.track_of);

    const auto end = clock::now();
    out.bottom_up_ms = std::chrono::duration<double, std::milli>(bottom_up_end - start).count();
    out.total_ms = std::chrono::duration<double, std::milli>(end - start).count();
    return out;
  }

 private:
  PipelineConfig config_;
  TrackMemory memory_;
  std::deque<RealPlane> history_;  // intensity planes of the last tau frames
};

/// Map a working-resolution point into the pixel grid of the ground truth
/// (pixel centers line up). Identity when the sizes agree.
[[nodiscard]] inline Point to_truth_coords(Point p, int working_width, int working_height,
                                           const GroundTruth& truth) {
  if (truth.width == working_width && truth.height == working_height) return p;
  const double sx = static_cast<double>(truth.width) / working_width;
  const double sy = static_cast<double>(truth.height) / working_height;
  return {(p.x + 0.5) * sx - 0.5, (p.y + 0.5) * sy - 0.5};
}

/// Accumulates per-frame results into an EvalReport. Ground truth is optional;
/// without it only timing and coverage are reported.
class Evaluation {
 public:
  explicit Evaluation(const GroundTruth* truth = nullptr) : truth_(truth) {
    if (truth_) scorer_.emplace(*truth_);
  }

  void add(const FrameResult& r) {
    ++frames_;
    bottom_up_ms_ += r.bottom_up_ms;
    total_ms_ += r.total_ms;
    const auto area = static_cast<double>(r.working.width()) * r.working.height();
    coverage_ += area > 0 ? static_cast<double>(r.region_area()) / area : 0.0;
    events_.insert(events_.end(), r.events.begin(), r.events.end());
    if (!scorer_) return;
    auto map = [&](Point p) { return to_truth_coords(p, r.working.width(), r.working.height(), *truth_); };
    for (std::size_t i = 0; i < r.descriptors.size(); ++i) {
      scorer_->observe({r.working.index, r.track_of[i], map(r.descriptors[i].center),
                        r.assignments[i].track.has_value()});
    }
    for (auto e : r.events) {
      e.center = map(e.center);
      truth_events_.push_back(e);
    }
  }

  /// Events as emitted, in working coordinates.
  [[nodiscard]] const std::vector<SuspicionEvent>& events() const noexcept { return events_; }

  /// Scripted jumps followed by an event within `window` frames. Needs truth.
  [[nodiscard]] RecallTally recall(long window = 2) const {
    if (!truth_) throw InvalidState("recall needs ground truth");
    return suspicion_recall(truth_events_, *truth_, window);
  }

  [[nodiscard]] EvalReport report() const {
    EvalReport rep;
    rep.frames = frames_;
    if (frames_ > 0) {
      rep.mean_bottom_up_ms = bottom_up_ms_ / static_cast<double>(frames_);
      rep.mean_total_ms = total_ms_ / static_cast<double>(frames_);
      rep.mean_region_coverage = coverage_ / static_cast<double>(frames_);
    }
    rep.n_suspicious_flagged = static_cast<long>(events_.size());
    if (scorer_) {
      const auto t = scorer_->tally();
      rep.true_matches = t.true_count;
      rep.false_matches = t.false_count;
      rep.match_score = t.score;
      const auto fa = false_alert(truth_events_, *truth_);
      rep.n_false_alerts = fa.n_false;
      rep.false_alert_rate = fa.rate;
    }
    return rep;
  }

 private:
  const GroundTruth* truth_;
  std::optional<MatchScorer> scorer_;
  std::vector<SuspicionEvent> events_;
  std::vector<SuspicionEvent> truth_events_;  // centers mapped into truth coordinates
  long frames_ = 0;
  double bottom_up_ms_ = 0.0;
  double total_ms_ = 0.0;
  double coverage_ = 0.0;
};

}  // namespace vatt
