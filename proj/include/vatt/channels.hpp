#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vatt/plane.hpp"

namespace vatt {

struct ChannelConfig {
  int latency_tau = 1;          // frame gap for the motion channel
  int target_long_side = 86;
  int target_short_side = 64;

  void validate() const {
    if (latency_tau < 1) throw InvalidConfig("tau must be >= 1");
    if (target_long_side < 8 || target_short_side < 8) {
      throw InvalidConfig("target_long_side and target_short_side must be >= 8");
    }
    if (target_short_side > target_long_side) {
      throw InvalidConfig("target_short_side must not exceed target_long_side");
    }
  }
};

/// The four feature planes of one frame: red/green and blue/yellow
/// opponency, intensity, and temporal intensity change.
struct ChannelSet {
  RealPlane rg;
  RealPlane by;
  RealPlane intensity;
  RealPlane motion;

  [[nodiscard]] int width() const noexcept { return intensity.width(); }
  [[nodiscard]] int height() const noexcept { return intensity.height(); }
};

struct WorkingSize {
  int width = 0;
  int height = 0;
};

/// Output size for an input of the given dimensions: the longer side becomes
/// target_long_side, the shorter keeps the aspect ratio, clamped to
/// [8, target_short_side]. Square inputs are treated as landscape.
[[nodiscard]] inline WorkingSize working_size(int width, int height, const ChannelConfig& config) {
  if (width <= 0 || height <= 0) throw InvalidInput("frame has a zero dimension");
  const bool landscape = width >= height;
  const double longer = landscape ? width : height;
  const double shorter = landscape ? height : width;
  const int out_long = config.target_long_side;
  int out_short = static_cast<int>(std::lround(shorter * out_long / longer));
  out_short = std::clamp(out_short, 8, config.target_short_side);
  return landscape ? WorkingSize{out_long, out_short} : WorkingSize{out_short, out_long};
}

namespace detail {

struct Tap {
  int source;
  double weight;
};

// Box-filter taps mapping `in` samples onto `out` samples. Each output sample
// averages the input interval it covers, weighting partially covered samples
// by their overlap.
inline std::vector<std::vector<Tap>> area_taps(int in, int out) {
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(in - 1, static_cast<int>(std::ceil(hi)) - 1);
    auto& row = taps[static_cast<std::size_t>(o)];
    double total = 0.0;
    for (int s = first; s <= last; ++s) {
      const double w = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
      if (w > 0.0) {
        row.push_back({s, w});
        total += w;
      }
    }
    for (auto& t : row) t.weight /= total;
  }
  return taps;
}

}  // namespace detail

/// Area-averaging resize to the working resolution.
[[nodiscard]] inline Frame resize_frame(const Frame& frame, const ChannelConfig& config) {
  config.validate();
  const auto [out_w, out_h] = working_size(frame.width(), frame.height(), config);
  if (out_w == frame.width() && out_h == frame.height()) return frame;

  const auto xtaps = detail::area_taps(frame.width(), out_w);
  const auto ytaps = detail::area_taps(frame.height(), out_h);

  Plane<Rgb> horizontal(out_w, frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < out_w; ++x) {
      Rgb acc;
      for (const auto& t : xtaps[static_cast<std::size_t>(x)]) {
        const Rgb& p = frame.pixels(t.source, y);
        acc.r += t.weight * p.r;
        acc.g += t.weight * p.g;
        acc.b += t.weight * p.b;
      }
      horizontal(x, y) = acc;
    }
  }

  Frame out{Plane<Rgb>(out_w, out_h), frame.index};
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      Rgb acc;
      for (const auto& t : ytaps[static_cast<std::size_t>(y)]) {
        const Rgb& p = horizontal(x, t.source);
        acc.r += t.weight * p.r;
        acc.g += t.weight * p.g;
        acc.b += t.weight * p.b;
      }
      out.pixels(x, y) = {std::clamp(acc.r, 0.0, 1.0), std::clamp(acc.g, 0.0, 1.0),
                          std::clamp(acc.b, 0.0, 1.0)};
    }
  }
  return out;
}

[[nodiscard]] inline double intensity_of(const Rgb& p) noexcept { return (p.r + p.g + p.b) / 3.0; }

/// Broadly tuned color responses; negative values are kept.
struct ColorResponse {
  double red;
  double green;
  double blue;
  double yellow;
};

[[nodiscard]] inline ColorResponse color_response(const Rgb& p) noexcept {
  return {p.r - (p.g + p.b) / 2.0, p.g - (p.r + p.b) / 2.0, p.b - (p.r + p.g) / 2.0,
          (p.r + p.g) / 2.0 - std::abs(p.r - p.g) / 2.0 - p.b};
}

[[nodiscard]] inline RealPlane intensity_plane(const Frame& frame) {
  RealPlane out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) out(x, y) = intensity_of(frame.pixels(x, y));
  }
  return out;
}

namespace detail {

inline ChannelSet decompose_static(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  if (w <= 0 || h <= 0) throw InvalidInput("frame has a zero dimension");
  ChannelSet set{RealPlane(w, h), RealPlane(w, h), RealPlane(w, h), RealPlane(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb& p = frame.pixels(x, y);
      const auto c = color_response(p);
      set.rg(x, y) = c.red - c.green;
      set.by(x, y) = c.blue - c.yellow;
      set.intensity(x, y) = intensity_of(p);
    }
  }
  return set;
}

}  // namespace detail

/// Channels for a frame with no t-tau history: the motion plane is all zero.
[[nodiscard]] inline ChannelSet decompose(const Frame& frame, const ChannelConfig& config) {
  config.validate();
  return detail::decompose_static(frame);
}

/// Channels for a frame given the intensity plane of frame t-tau.
[[nodiscard]] inline ChannelSet decompose(const Frame& frame, const RealPlane& previous_intensity,
                                          const ChannelConfig& config) {
  config.validate();
  if (!previous_intensity.same_shape(frame.pixels)) {
    throw InvalidInput("previous intensity plane does not match frame dimensions");
  }
  ChannelSet set = detail::decompose_static(frame);
  auto cur = set.intensity.values();
  auto prev = previous_intensity.values();
  auto motion = set.motion.values();
  for (std::size_t i = 0; i < motion.size(); ++i) motion[i] = std::abs(cur[i] - prev[i]);
  return set;
}

}  // namespace vatt
