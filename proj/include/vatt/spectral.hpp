#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "vatt/channels.hpp"
#include "vatt/plane.hpp"

namespace vatt {

/// Fused, smoothed conspicuity plane normalized to [0,1].
struct SaliencyMap {
  RealPlane values;
  long frame_index = 0;
};

struct FusionConfig {
  double weight_rg = 1.0;
  double weight_by = 1.0;
  double weight_i = 1.0;
  double weight_m = 2.0;  // motion is weighted slightly higher
  int disk_radius = 3;

  void validate() const {
    const std::array w{weight_rg, weight_by, weight_i, weight_m};
    if (std::any_of(w.begin(), w.end(), [](double v) { return !(v >= 0.0); })) {
      throw InvalidConfig("fusion weights lambda_rg, lambda_by, lambda_i, lambda_m must be nonnegative");
    }
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
      throw InvalidConfig("at least one of lambda_rg, lambda_by, lambda_i, lambda_m must be positive");
    }
    if (disk_radius < 1) throw InvalidConfig("disk_radius must be >= 1");
  }
};

/// Bins whose amplitude falls below this are given phase 0.
inline constexpr double kZeroAmplitude = 1e-12;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Forward/backward 2-D complex plans sharing one buffer. The FFTW planner is
// not reentrant, so plan creation and destruction are serialized.
class FftPlan2d {
 public:
  FftPlan2d(int width, int height) : count_(static_cast<std::size_t>(width) * height) {
    buffer_ = fftw_alloc_complex(count_);
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_2d(height, width, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(height, width, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FftPlan2d(const FftPlan2d&) = delete;
  FftPlan2d& operator=(const FftPlan2d&) = delete;
  ~FftPlan2d() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  [[nodiscard]] std::complex<double>* data() noexcept {
    return reinterpret_cast<std::complex<double>*>(buffer_);
  }
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  void forward() noexcept { fftw_execute(forward_); }
  void backward() noexcept { fftw_execute(backward_); }

 private:
  std::size_t count_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

inline FftPlan2d& plan_for(int width, int height) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan2d>> cache;
  auto& slot = cache[{width, height}];
  if (!slot) slot = std::make_unique<FftPlan2d>(width, height);
  return *slot;
}

inline bool is_constant(const RealPlane& plane) {
  const auto [lo, hi] = std::minmax_element(plane.values().begin(), plane.values().end());
  return *hi - *lo <= kZeroAmplitude;
}

}  // namespace detail

/// Phase-only Fourier reconstruction: the squared magnitude of the inverse
/// transform of the unit-amplitude phase spectrum.
[[nodiscard]] inline RealPlane pft(const RealPlane& channel) {
  if (channel.width() < 2 || channel.height() < 2) {
    throw InvalidInput("pft requires a plane of at least 2x2");
  }
  auto& plan = detail::plan_for(channel.width(), channel.height());
  auto* buf = plan.data();
  const auto in = channel.values();
  for (std::size_t i = 0; i < in.size(); ++i) buf[i] = {in[i], 0.0};

  plan.forward();
  for (std::size_t i = 0; i < plan.count(); ++i) {
    const double amplitude = std::abs(buf[i]);
    buf[i] = amplitude < kZeroAmplitude ? std::complex<double>(1.0, 0.0) : buf[i] / amplitude;
  }
  plan.backward();

  const double norm = 1.0 / static_cast<double>(plan.count());
  RealPlane out(channel.width(), channel.height());
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::norm(buf[i] * norm);
  return out;
}

/// Mean over the disk of the given radius with replicated edges.
[[nodiscard]] inline RealPlane disk_filter(const RealPlane& plane, int radius) {
  if (radius < 1) throw InvalidConfig("disk radius must be >= 1");
  std::vector<PixelCoord> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.push_back({dx, dy});
    }
  }
  const double weight = 1.0 / static_cast<double>(offsets.size());
  const int w = plane.width();
  const int h = plane.height();
  RealPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (const auto& o : offsets) {
        acc += plane(std::clamp(x + o.x, 0, w - 1), std::clamp(y + o.y, 0, h - 1));
      }
      out(x, y) = acc * weight;
    }
  }
  return out;
}

/// Linear rescale so the maximum becomes 1; an all-zero plane stays zero.
inline void normalize_max(RealPlane& plane) {
  const double peak = max_value(plane);
  if (peak <= 0.0) {
    std::fill(plane.values().begin(), plane.values().end(), 0.0);
    return;
  }
  for (auto& v : plane.values()) v = std::clamp(v / peak, 0.0, 1.0);
}

/// Weighted sum of the per-channel phase maps, before smoothing. A channel
/// that is constant over the frame carries no spatial information and
/// contributes nothing (its phase reconstruction would be a lone impulse at
/// the origin).
[[nodiscard]] inline RealPlane combine(const ChannelSet& channels, const FusionConfig& config) {
  config.validate();
  const std::array<std::pair<const RealPlane*, double>, 4> inputs{{
      {&channels.rg, config.weight_rg},
      {&channels.by, config.weight_by},
      {&channels.intensity, config.weight_i},
      {&channels.motion, config.weight_m},
  }};
  for (const auto& [plane, weight] : inputs) {
    if (!plane->same_shape(channels.intensity)) {
      throw InvalidInput("channel planes differ in size");
    }
  }
  RealPlane sum(channels.width(), channels.height());
  for (const auto& [plane, weight] : inputs) {
    if (weight == 0.0 || detail::is_constant(*plane)) continue;
    const RealPlane map = pft(*plane);
    auto dst = sum.values();
    auto src = map.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weight * src[i];
  }
  return sum;
}

[[nodiscard]] inline SaliencyMap fuse(const ChannelSet& channels, const FusionConfig& config,
                                      long frame_index = 0) {
  SaliencyMap map{disk_filter(combine(channels, config), config.disk_radius), frame_index};
  normalize_max(map.values);
  return map;
}

}  // namespace vatt
