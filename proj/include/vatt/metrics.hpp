#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vatt/ior.hpp"
#include "vatt/plane.hpp"
#include "vatt/tracker.hpp"

namespace vatt {

struct TruthObject {
  int id = 0;
  BoundingBox box;
};

struct FrameTruth {
  long index = 0;
  std::vector<TruthObject> objects;
  std::vector<int> suspicious;  // object ids

  [[nodiscard]] bool is_suspicious(int id) const {
    return std::find(suspicious.begin(), suspicious.end(), id) != suspicious.end();
  }
};

/// Labeled object boxes and suspicion labels per frame.
struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<FrameTruth> frames;

  [[nodiscard]] const FrameTruth* frame(long index) const {
    if (index >= 0 && index < static_cast<long>(frames.size()) &&
        frames[static_cast<std::size_t>(index)].index == index) {
      return &frames[static_cast<std::size_t>(index)];
    }
    auto it = std::find_if(frames.begin(), frames.end(), [&](const auto& f) { return f.index == index; });
    return it == frames.end() ? nullptr : &*it;
  }
};

/// Truth object whose box contains `center` (lowest id on overlap).
[[nodiscard]] inline std::optional<int> attribute(Point center, const FrameTruth& truth) {
  std::optional<int> best;
  for (const auto& o : truth.objects) {
    if (o.box.contains(center.x, center.y) && (!best || o.id < *best)) best = o.id;
  }
  return best;
}

[[nodiscard]] inline std::optional<int> attribute(Point center, long frame, const GroundTruth& truth) {
  const auto* ft = truth.frame(frame);
  return ft ? attribute(center, *ft) : std::nullopt;
}

/// One descriptor's tracking outcome in one frame.
struct TrackObservation {
  long frame_index = 0;
  TrackId track;
  Point center;
  bool matched = false;  // continued an existing track rather than starting one
};

struct MatchTally {
  long true_count = 0;
  long false_count = 0;
  std::optional<double> score;  // absent when no matches were made
};

[[nodiscard]] inline std::optional<double> match_score(long true_count, long false_count) {
  const long total = true_count + false_count;
  if (total == 0) return std::nullopt;
  return static_cast<double>(true_count) / static_cast<double>(total);
}

[[nodiscard]] inline double false_alert_rate(long n_false, long n_flagged) {
  return n_flagged == 0 ? 0.0 : static_cast<double>(n_false) / static_cast<double>(n_flagged);
}

/// Streaming match scorer. A match is true when the current region and the
/// region the track was last updated from belong to the same truth object.
class MatchScorer {
 public:
  explicit MatchScorer(const GroundTruth& truth) : truth_(&truth) {}

  void observe(const TrackObservation& obs) {
    const auto current = attribute(obs.center, obs.frame_index, *truth_);
    if (obs.matched) {
      auto it = last_.find(obs.track);
      const bool ok = current && it != last_.end() && it->second && *it->second == *current;
      ++(ok ? tally_.true_count : tally_.false_count);
    }
    last_[obs.track] = current;
  }

  [[nodiscard]] MatchTally tally() const {
    MatchTally t = tally_;
    t.score = match_score(t.true_count, t.false_count);
    return t;
  }

 private:
  const GroundTruth* truth_;
  std::map<TrackId, std::optional<int>> last_;
  MatchTally tally_;
};

/// Observations must be in frame order.
[[nodiscard]] inline MatchTally score_matches(std::span<const TrackObservation> observations,
                                              const GroundTruth& truth) {
  MatchScorer scorer(truth);
  for (const auto& o : observations) scorer.observe(o);
  return scorer.tally();
}

struct FalseAlertTally {
  long flagged = 0;
  long n_false = 0;
  double rate = 0.0;
};

/// An event is a false alert unless its center lies on a truth object that
/// is labeled suspicious in that frame.
[[nodiscard]] inline bool is_false_alert(const SuspicionEvent& e, const GroundTruth& truth) {
  const auto* ft = truth.frame(e.frame_index);
  if (ft == nullptr) return true;
  const auto id = attribute(e.center, *ft);
  return !id || !ft->is_suspicious(*id);
}

[[nodiscard]] inline FalseAlertTally false_alert(std::span<const SuspicionEvent> events,
                                                 const GroundTruth& truth) {
  FalseAlertTally t;
  t.flagged = static_cast<long>(events.size());
  t.n_false = static_cast<long>(
      std::count_if(events.begin(), events.end(), [&](const auto& e) { return is_false_alert(e, truth); }));
  t.rate = false_alert_rate(t.n_false, t.flagged);
  return t;
}

/// Onset of each labeled suspicious episode: (object id, first frame).
struct SuspicionOnset {
  int object = 0;
  long frame = 0;
};

[[nodiscard]] inline std::vector<SuspicionOnset> suspicion_onsets(const GroundTruth& truth) {
  std::vector<SuspicionOnset> out;
  std::map<int, long> last_flagged;
  for (const auto& f : truth.frames) {
    for (int id : f.suspicious) {
      auto it = last_flagged.find(id);
      if (it == last_flagged.end() || it->second != f.index - 1) out.push_back({id, f.index});
      last_flagged[id] = f.index;
    }
  }
  return out;
}

struct RecallTally {
  long onsets = 0;
  long detected = 0;
};

/// Onsets followed by an event on the same object within `window` frames.
[[nodiscard]] inline RecallTally suspicion_recall(std::span<const SuspicionEvent> events,
                                                  const GroundTruth& truth, long window = 2) {
  RecallTally r;
  for (const auto& onset : suspicion_onsets(truth)) {
    ++r.onsets;
    const bool hit = std::any_of(events.begin(), events.end(), [&](const SuspicionEvent& e) {
      if (e.frame_index < onset.frame || e.frame_index > onset.frame + window) return false;
      return attribute(e.center, e.frame_index, truth) == std::optional<int>(onset.object);
    });
    if (hit) ++r.detected;
  }
  return r;
}

/// Mean over frames of kept-region area divided by frame area.
[[nodiscard]] inline double coverage(std::span<const std::size_t> region_area_per_frame,
                                     std::size_t frame_area) {
  if (region_area_per_frame.empty() || frame_area == 0) return 0.0;
  double sum = 0.0;
  for (auto a : region_area_per_frame) sum += static_cast<double>(a) / static_cast<double>(frame_area);
  return sum / static_cast<double>(region_area_per_frame.size());
}

/// Frame pairs (t-1, t) in which the same object is labeled in both frames.
[[nodiscard]] inline long match_opportunities(const GroundTruth& truth) {
  long n = 0;
  for (std::size_t i = 1; i < truth.frames.size(); ++i) {
    for (const auto& o : truth.frames[i].objects) {
      const auto& prev = truth.frames[i - 1].objects;
      if (std::any_of(prev.begin(), prev.end(), [&](const auto& p) { return p.id == o.id; })) ++n;
    }
  }
  return n;
}

struct EvalReport {
  long frames = 0;
  long true_matches = 0;
  long false_matches = 0;
  std::optional<double> match_score;
  long n_suspicious_flagged = 0;
  long n_false_alerts = 0;
  double false_alert_rate = 0.0;
  double mean_bottom_up_ms = 0.0;
  double mean_total_ms = 0.0;
  double mean_region_coverage = 0.0;
};

}  // namespace vatt
