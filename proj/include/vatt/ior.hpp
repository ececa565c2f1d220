#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "vatt/plane.hpp"
#include "vatt/spectral.hpp"

namespace vatt {

/// Frame area at which max_region_px is specified (64 x 86).
inline constexpr int kReferenceArea = 64 * 86;

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  [[nodiscard]] bool contains(double x, double y) const noexcept {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// One object candidate area: an 8-connected component grown from a
/// saliency maximum.
struct Region {
  std::vector<PixelCoord> pixels;
  PixelCoord peak;
  double peak_value = 0.0;
  double alpha = 0.0;  // threshold factor used when the region was grown
  BoundingBox bbox;
  Point center;

  [[nodiscard]] std::size_t size() const noexcept { return pixels.size(); }
};

struct IorConfig {
  double alpha_far = 0.65;   // top row
  double alpha_near = 0.45;  // bottom row
  int max_regions = 4;
  int max_region_px = 300;   // absolute, at the working size in use
  double min_peak_fraction = 0.1;

  void validate() const {
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!open_unit(alpha_far) || !open_unit(alpha_near)) {
      throw InvalidConfig("alpha_far and alpha_near must lie in (0,1)");
    }
    if (max_regions < 1) throw InvalidConfig("max_regions must be >= 1");
    if (max_region_px < 1) throw InvalidConfig("max_region_px must be >= 1");
    if (!open_unit(min_peak_fraction)) throw InvalidConfig("min_peak_fraction must lie in (0,1)");
  }
};

/// Oversize limit for a working frame of `area` pixels given a limit stated at
/// the 64 x 86 reference size.
[[nodiscard]] inline int scaled_region_limit(int reference_limit, int area) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(reference_limit) * area /
                                                  kReferenceArea)));
}

/// Threshold factor for a row: linear from alpha_far at the top row to
/// alpha_near at the bottom row.
[[nodiscard]] inline double alpha_at(int row, int height, const IorConfig& config) {
  if (height <= 1) return config.alpha_far;
  const double t = static_cast<double>(row) / static_cast<double>(height - 1);
  return config.alpha_far + (config.alpha_near - config.alpha_far) * t;
}

/// 8-connected component of pixels with values in [low, high] that contains
/// `seed`. Empty if the seed itself is outside the band.
[[nodiscard]] inline std::vector<PixelCoord> grow_region(const RealPlane& map, PixelCoord seed,
                                                         double low, double high) {
  std::vector<PixelCoord> out;
  if (!map.contains(seed.x, seed.y)) return out;
  auto in_band = [&](int x, int y) {
    const double v = map(x, y);
    return v >= low && v <= high;
  };
  if (!in_band(seed.x, seed.y)) return out;

  Plane<unsigned char> visited(map.width(), map.height(), 0);
  std::deque<PixelCoord> queue{seed};
  visited(seed.x, seed.y) = 1;
  while (!queue.empty()) {
    const PixelCoord p = queue.front();
    queue.pop_front();
    out.push_back(p);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = p.x + dx;
        const int ny = p.y + dy;
        if (!map.contains(nx, ny) || visited(nx, ny)) continue;
        if (!in_band(nx, ny)) continue;
        visited(nx, ny) = 1;
        queue.push_back({nx, ny});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](PixelCoord a, PixelCoord b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return out;
}

[[nodiscard]] inline BoundingBox bounding_box(const std::vector<PixelCoord>& pixels) {
  BoundingBox box{pixels.front().x, pixels.front().y, pixels.front().x, pixels.front().y};
  for (const auto& p : pixels) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

/// Inhibition of return: repeatedly attend the global maximum, grow its
/// band-limited component, suppress it, and keep it unless oversize.
/// Regions come back in decreasing peak order and are pairwise disjoint.
[[nodiscard]] inline std::vector<Region> extract_regions(const SaliencyMap& map, const IorConfig& config) {
  config.validate();
  std::vector<Region> regions;
  if (map.values.empty()) return regions;

  RealPlane work = map.values;
  const double floor = config.min_peak_fraction * max_value(work);
  const auto limit = static_cast<std::size_t>(config.max_region_px);

  while (regions.size() < static_cast<std::size_t>(config.max_regions)) {
    // Row-major scan with a strict comparison keeps the smallest (y, x) on ties.
    PixelCoord peak{0, 0};
    double peak_value = work(0, 0);
    for (int y = 0; y < work.height(); ++y) {
      for (int x = 0; x < work.width(); ++x) {
        if (work(x, y) > peak_value) {
          peak_value = work(x, y);
          peak = {x, y};
        }
      }
    }
    if (peak_value <= 0.0 || peak_value < floor) break;

    const double alpha = alpha_at(peak.y, work.height(), config);
    auto pixels = grow_region(work, peak, alpha * peak_value, peak_value);
    for (const auto& p : pixels) work(p.x, p.y) = 0.0;
    if (pixels.size() > limit) continue;

    Region region;
    region.bbox = bounding_box(pixels);
    region.center = {(region.bbox.min_x + region.bbox.max_x) / 2.0,
                     (region.bbox.min_y + region.bbox.max_y) / 2.0};
    region.pixels = std::move(pixels);
    region.peak = peak;
    region.peak_value = peak_value;
    region.alpha = alpha;
    regions.push_back(std::move(region));
  }
  return regions;
}

}  // namespace vatt
