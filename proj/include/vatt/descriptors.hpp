#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "vatt/channels.hpp"
#include "vatt/ior.hpp"
#include "vatt/plane.hpp"

namespace vatt {

inline constexpr int kHistogramBins = 10;
inline constexpr int kHistogramChannels = 4;  // r, g, b, intensity

/// Per-channel probability over ten equal-width intervals of [0,1].
struct ColorHistogram {
  std::array<std::array<double, kHistogramBins>, kHistogramChannels> bins{};

  friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

/// Interval index for a value in [0,1]: [k/10, (k+1)/10), with 1.0 in the last bin.
[[nodiscard]] inline int histogram_bin(double v) noexcept {
  const int k = static_cast<int>(std::floor(v * kHistogramBins));
  return std::clamp(k, 0, kHistogramBins - 1);
}

struct RegionDescriptor {
  ColorHistogram histogram;
  std::size_t size = 0;
  Point center;
  BoundingBox bbox;
  long frame_index = 0;
  double row_band = 0.0;  // center row as a fraction of the frame height
};

[[nodiscard]] inline double row_band_of(double y, int height) noexcept {
  if (height <= 1) return 0.0;
  return std::clamp(y / static_cast<double>(height - 1), 0.0, 1.0);
}

/// Appearance record for a region of `frame`.
[[nodiscard]] inline RegionDescriptor describe(const Region& region, const Frame& frame) {
  if (region.pixels.empty()) throw InvalidInput("cannot describe an empty region");
  RegionDescriptor d;
  std::array<std::array<std::size_t, kHistogramBins>, kHistogramChannels> counts{};
  for (const auto& p : region.pixels) {
    if (!frame.pixels.contains(p.x, p.y)) throw InvalidInput("region pixel outside frame");
    const Rgb& c = frame.pixels(p.x, p.y);
    ++counts[0][static_cast<std::size_t>(histogram_bin(c.r))];
    ++counts[1][static_cast<std::size_t>(histogram_bin(c.g))];
    ++counts[2][static_cast<std::size_t>(histogram_bin(c.b))];
    ++counts[3][static_cast<std::size_t>(histogram_bin(intensity_of(c)))];
  }
  const double n = static_cast<double>(region.pixels.size());
  for (std::size_t ch = 0; ch < counts.size(); ++ch) {
    for (std::size_t k = 0; k < counts[ch].size(); ++k) {
      d.histogram.bins[ch][k] = static_cast<double>(counts[ch][k]) / n;
    }
  }
  d.size = region.pixels.size();
  d.bbox = bounding_box(region.pixels);
  d.center = {(d.bbox.min_x + d.bbox.max_x) / 2.0, (d.bbox.min_y + d.bbox.max_y) / 2.0};
  d.frame_index = frame.index;
  d.row_band = row_band_of(d.center.y, frame.height());
  return d;
}

}  // namespace vatt
