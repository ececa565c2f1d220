#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vatt/pipeline.hpp"

namespace vatt {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidConfig("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return v;
}

struct Knob {
  std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T, typename Access>
Knob knob(Access access) {
  return {[access](PipelineConfig& c, std::string_view key, std::string_view value) {
            access(c) = parse_number<T>(key, value);
          },
          [access](const PipelineConfig& c) {
            PipelineConfig copy = c;
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, access(copy));  // shortest round trip
            return std::string(buf, res.ptr);
          }};
}

inline const std::map<std::string, Knob, std::less<>>& knobs() {
  static const std::map<std::string, Knob, std::less<>> table = [] {
    std::map<std::string, Knob, std::less<>> t;
    t["tau"] = knob<int>([](PipelineConfig& c) -> int& { return c.channels.latency_tau; });
    t["target_long_side"] = knob<int>([](PipelineConfig& c) -> int& { return c.channels.target_long_side; });
    t["target_short_side"] = knob<int>([](PipelineConfig& c) -> int& { return c.channels.target_short_side; });
    t["lambda_rg"] = knob<double>([](PipelineConfig& c) -> double& { return c.fusion.weight_rg; });
    t["lambda_by"] = knob<double>([](PipelineConfig& c) -> double& { return c.fusion.weight_by; });
    t["lambda_i"] = knob<double>([](PipelineConfig& c) -> double& { return c.fusion.weight_i; });
    t["lambda_m"] = knob<double>([](PipelineConfig& c) -> double& { return c.fusion.weight_m; });
    t["disk_radius"] = knob<int>([](PipelineConfig& c) -> int& { return c.fusion.disk_radius; });
    t["alpha_far"] = knob<double>([](PipelineConfig& c) -> double& { return c.ior.alpha_far; });
    t["alpha_near"] = knob<double>([](PipelineConfig& c) -> double& { return c.ior.alpha_near; });
    t["max_regions"] = knob<int>([](PipelineConfig& c) -> int& { return c.ior.max_regions; });
    t["max_region_px"] = knob<int>([](PipelineConfig& c) -> int& { return c.ior.max_region_px; });
    t["min_peak_fraction"] = knob<double>([](PipelineConfig& c) -> double& { return c.ior.min_peak_fraction; });
    t["eta"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.eta; });
    t["mu_far"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.mu_far; });
    t["mu_near"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.mu_near; });
    t["c_r"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.channel_weights[0]; });
    t["c_g"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.channel_weights[1]; });
    t["c_b"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.channel_weights[2]; });
    t["c_i"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.channel_weights[3]; });
    t["color_weight"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.color_weight; });
    t["position_weight"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.position_weight; });
    t["decision_threshold"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.decision_threshold; });
    t["epsilon_far"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.epsilon_far; });
    t["epsilon_near"] = knob<double>([](PipelineConfig& c) -> double& { return c.match.epsilon_near; });
    t["memory_capacity"] = knob<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.memory_capacity; });
    return t;
  }();
  return table;
}

}  // namespace detail

[[nodiscard]] inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::knobs()) out.push_back(k);
  return out;
}

/// Set one named knob from its text form. Unknown keys and unparsable values
/// raise InvalidConfig naming the key.
inline void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  const auto& table = detail::knobs();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidConfig("unknown config key '" + std::string(key) + "'");
  it->second.set(config, key, detail::trim(value));
}

/// Apply a "key=value" line.
inline void apply_assignment(PipelineConfig& config, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidConfig("expected key=value, got '" + std::string(detail::trim(line)) + "'");
  }
  apply_setting(config, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
}

/// Flat key=value text; '#' starts a comment, blank lines are ignored.
/// Settings are applied on top of `base`. The result is not validated here.
[[nodiscard]] inline PipelineConfig parse_config(std::string_view text, PipelineConfig base = {}) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (detail::trim(line).empty()) continue;
    try {
      apply_assignment(base, line);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

[[nodiscard]] inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

/// Every knob as key=value, one per line, in key order.
[[nodiscard]] inline std::string config_text(const PipelineConfig& config) {
  std::string out;
  for (const auto& [key, k] : detail::knobs()) out += key + "=" + k.get(config) + "\n";
  return out;
}

}  // namespace vatt
