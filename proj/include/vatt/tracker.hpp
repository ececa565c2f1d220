#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "vatt/descriptors.hpp"
#include "vatt/plane.hpp"

namespace vatt {

struct TrackId {
  std::uint64_t value = 0;

  friend bool operator==(const TrackId&, const TrackId&) = default;
  friend auto operator<=>(const TrackId&, const TrackId&) = default;
};

struct MatchConfig {
  double eta = 0.6;
  double mu_far = 120.0;  // squared pixels, top row
  double mu_near = 180.0;  // squared pixels, bottom row
  std::array<double, kHistogramChannels> channel_weights{0.25, 0.25, 0.25, 0.25};
  double color_weight = 0.7;
  double position_weight = 0.3;
  double decision_threshold = 0.7;
  double epsilon_far = 3.0;   // px/frame per frame, top row
  double epsilon_near = 4.0;  // px/frame per frame, bottom row

  void validate() const {
    if (!(eta > 0.0)) throw InvalidConfig("eta must be positive");
    if (!(mu_far > 0.0) || !(mu_near > 0.0)) throw InvalidConfig("mu_far and mu_near must be positive");
    if (!(epsilon_far > 0.0) || !(epsilon_near > 0.0)) {
      throw InvalidConfig("epsilon_far and epsilon_near must be positive");
    }
    for (double c : channel_weights) {
      if (!(c >= 0.0)) throw InvalidConfig("channel weights c_r, c_g, c_b, c_i must be nonnegative");
    }
    if (!(color_weight >= 0.0) || !(position_weight >= 0.0) ||
        std::abs(color_weight + position_weight - 1.0) > 1e-9) {
      throw InvalidConfig("color_weight and position_weight must be nonnegative and sum to 1");
    }
  }

  [[nodiscard]] double mu_at(double row_band) const noexcept {
    return mu_far + (mu_near - mu_far) * std::clamp(row_band, 0.0, 1.0);
  }
  [[nodiscard]] double epsilon_at(double row_band) const noexcept {
    return epsilon_far + (epsilon_near - epsilon_far) * std::clamp(row_band, 0.0, 1.0);
  }
};

/// Weighted sum over channels of the Euclidean distance between bin vectors.
[[nodiscard]] inline double histogram_distance(const ColorHistogram& a, const ColorHistogram& b,
                                               const MatchConfig& config) {
  double total = 0.0;
  for (std::size_t ch = 0; ch < a.bins.size(); ++ch) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.bins[ch].size(); ++k) {
      const double d = a.bins[ch][k] - b.bins[ch][k];
      sq += d * d;
    }
    total += config.channel_weights[ch] * std::sqrt(sq);
  }
  return total;
}

[[nodiscard]] inline double color_match(const ColorHistogram& a, const ColorHistogram& b,
                                        const MatchConfig& config) {
  return std::clamp(1.0 - histogram_distance(a, b, config) / config.eta, 0.0, 1.0);
}

/// Second difference of the last three centers; zero under uniform
/// rectilinear motion. With no earlier center it degrades to the plain
/// displacement.
[[nodiscard]] inline Point motion_residual(Point current, Point last, std::optional<Point> prev) {
  if (!prev) return {last.x - current.x, last.y - current.y};
  return {2.0 * last.x - prev->x - current.x, 2.0 * last.y - prev->y - current.y};
}

[[nodiscard]] inline double position_match(Point current, Point last, std::optional<Point> prev,
                                           double row_band, const MatchConfig& config) {
  const Point r = motion_residual(current, last, prev);
  const double sq = r.x * r.x + r.y * r.y;
  return std::clamp(1.0 - sq / config.mu_at(row_band), 0.0, 1.0);
}

[[nodiscard]] inline double decision(double cm, double pm, const MatchConfig& config) noexcept {
  return config.color_weight * cm + config.position_weight * pm;
}

struct TrackRecord {
  TrackId id;
  ColorHistogram histogram;
  std::size_t size = 0;
  Point last_center;
  std::optional<Point> prev_center;
  std::optional<double> speed;  // px/frame
  long appear_count = 1;
  long last_seen_frame = 0;
  long first_seen_frame = 0;
};

struct SuspicionEvent {
  long frame_index = 0;
  TrackId track_id;
  double delta_speed = 0.0;
  double threshold_used = 0.0;
  Point center;
};

struct FrameUpdate {
  std::vector<SuspicionEvent> events;
  std::vector<TrackId> track_of;  // per descriptor: continued or newly created track
};

/// Result of matching one descriptor: the record it continues, or none for a
/// new track.
struct Assignment {
  std::size_t descriptor = 0;
  std::optional<TrackId> track;
  double score = 0.0;
};

[[nodiscard]] inline double del_decision(const TrackRecord& r, long current_frame) noexcept {
  return 0.8 * static_cast<double>(r.appear_count) -
         0.2 * static_cast<double>(current_frame - r.last_seen_frame);
}

/// Bounded store of tracked appearance and motion records. Single writer.
class TrackMemory {
 public:
  explicit TrackMemory(std::size_t capacity = 1000) : capacity_(capacity) {
    if (capacity == 0) throw InvalidConfig("memory capacity must be positive");
  }

  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] long current_frame() const noexcept { return current_frame_; }
  [[nodiscard]] std::span<const TrackRecord> records() const noexcept { return records_; }

  [[nodiscard]] const TrackRecord* find(TrackId id) const noexcept {
    auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.id == id; });
    return it == records_.end() ? nullptr : &*it;
  }

  /// Greedy best-first matching of one frame's descriptors against memory.
  /// Pairs are accepted in decreasing score order; pairs below the decision
  /// threshold are never accepted. One assignment per descriptor, in input order.
  [[nodiscard]] std::vector<Assignment> assign(std::span<const RegionDescriptor> descriptors,
                                               const MatchConfig& config) const {
    config.validate();
    struct Candidate {
      double score;
      std::size_t descriptor;
      std::size_t record;
    };
    std::vector<Candidate> candidates;
    for (std::size_t d = 0; d < descriptors.size(); ++d) {
      const auto& desc = descriptors[d];
      for (std::size_t r = 0; r < records_.size(); ++r) {
        const auto& rec = records_[r];
        const double cm = color_match(desc.histogram, rec.histogram, config);
        const double pm = position_match(desc.center, rec.last_center, rec.prev_center, desc.row_band, config);
        const double score = decision(cm, pm, config);
        if (score >= config.decision_threshold) candidates.push_back({score, d, r});
      }
    }
    // Ties resolve on descriptor content and track id so the outcome does not
    // depend on the order descriptors were supplied in.
    auto key = [&](const Candidate& c) {
      const auto& desc = descriptors[c.descriptor];
      return std::make_tuple(-c.score, desc.center.y, desc.center.x, desc.size, records_[c.record].id);
    };
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); });

    std::vector<Assignment> out(descriptors.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d].descriptor = d;
    std::vector<bool> record_taken(records_.size(), false);
    for (const auto& c : candidates) {
      if (out[c.descriptor].track || record_taken[c.record]) continue;
      out[c.descriptor].track = records_[c.record].id;
      out[c.descriptor].score = c.score;
      record_taken[c.record] = true;
    }
    return out;
  }

  /// Apply one frame's assignments: refresh matched records, insert new ones
  /// (evicting when full), and report velocity discontinuities.
  FrameUpdate update(std::span<const RegionDescriptor> descriptors,
                     std::span<const Assignment> assignments, long frame_index,
                     const MatchConfig& config) {
    config.validate();
    current_frame_ = frame_index;
    FrameUpdate result;
    auto& events = result.events;
    result.track_of.resize(descriptors.size());
    for (const auto& a : assignments) {
      if (!a.track) continue;
      result.track_of[a.descriptor] = *a.track;
      auto* rec = find_mutable(*a.track);
      if (rec == nullptr) throw InvalidInput("assignment refers to an unknown track");
      const auto& desc = descriptors[a.descriptor];
      const long gap = std::max(1L, frame_index - rec->last_seen_frame);
      const double dx = desc.center.x - rec->last_center.x;
      const double dy = desc.center.y - rec->last_center.y;
      const double speed = std::hypot(dx, dy) / static_cast<double>(gap);
      if (rec->speed) {
        const double delta = std::abs(speed - *rec->speed) / static_cast<double>(gap);
        const double threshold = config.epsilon_at(desc.row_band);
        if (delta > threshold) events.push_back({frame_index, rec->id, delta, threshold, desc.center});
      }
      rec->histogram = desc.histogram;
      rec->size = desc.size;
      rec->prev_center = rec->last_center;
      rec->last_center = desc.center;
      rec->speed = speed;
      ++rec->appear_count;
      rec->last_seen_frame = frame_index;
    }
    for (const auto& a : assignments) {
      if (a.track) continue;
      const auto& desc = descriptors[a.descriptor];
      if (records_.size() >= capacity_) evict();
      TrackRecord rec;
      rec.id = TrackId{next_id_++};
      rec.histogram = desc.histogram;
      rec.size = desc.size;
      rec.last_center = desc.center;
      rec.last_seen_frame = frame_index;
      rec.first_seen_frame = frame_index;
      records_.push_back(rec);
      result.track_of[a.descriptor] = rec.id;
    }
    return result;
  }

  /// Remove the record with the lowest retention score
  /// 0.8 * appear_count - 0.2 * frames since last seen. Ties go to the oldest
  /// first sighting, then the smallest id.
  TrackId evict() {
    if (records_.size() < capacity_) throw InvalidState("evict called below capacity");
    auto worst = std::min_element(records_.begin(), records_.end(), [&](const auto& a, const auto& b) {
      return std::make_tuple(del_decision(a, current_frame_), a.first_seen_frame, a.id) <
             std::make_tuple(del_decision(b, current_frame_), b.first_seen_frame, b.id);
    });
    const TrackId id = worst->id;
    records_.erase(worst);
    return id;
  }

  /// Test and replay hook: place a record directly.
  void insert_record(const TrackRecord& record) {
    if (find(record.id) != nullptr) throw InvalidInput("duplicate track id");
    if (records_.size() >= capacity_) evict();
    records_.push_back(record);
    next_id_ = std::max(next_id_, record.id.value + 1);
  }
  void set_current_frame(long frame) noexcept { current_frame_ = frame; }

 private:
  TrackRecord* find_mutable(TrackId id) noexcept {
    auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.id == id; });
    return it == records_.end() ? nullptr : &*it;
  }

  std::size_t capacity_;
  std::vector<TrackRecord> records_;
  long current_frame_ = 0;
  std::uint64_t next_id_ = 0;
};

}  // namespace vatt
