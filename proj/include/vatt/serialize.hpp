#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>

#include <json.hpp>

#include "vatt/metrics.hpp"
#include "vatt/synthgen.hpp"
#include "vatt/tracker.hpp"

namespace vatt {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInput(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(where + ": bad value for '" + key + "'");
  }
}

inline json rgb_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

inline Rgb rgb_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw InvalidInput(where + ": color must be [r, g, b]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Point point_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidInput(where + ": point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

// --- scene scripts ----------------------------------------------------------

[[nodiscard]] inline json to_json(const SceneScript& s) {
  json actors = json::array();
  for (const auto& a : s.actors) {
    json wp = json::array();
    for (const auto& p : a.waypoints) wp.push_back({p.x, p.y});
    json ja{{"color", detail::rgb_json(a.color)}, {"width", a.width},   {"height", a.height},
            {"waypoints", wp},                    {"speeds", a.speeds}, {"jump_factor", a.jump_factor},
            {"edge_width", a.edge_width}};
    if (a.jump_frame) ja["jump_frame"] = *a.jump_frame;
    actors.push_back(ja);
  }
  return {{"seed", s.seed},
          {"frame_count", s.frame_count},
          {"width", s.width},
          {"height", s.height},
          {"min_contrast", s.min_contrast},
          {"background", {{"base", detail::rgb_json(s.background.base)}, {"noise", s.background.noise}}},
          {"actors", actors}};
}

/// Missing keys take their defaults; unknown keys are rejected.
[[nodiscard]] inline SceneScript scene_from_json(const json& j) {
  const std::string where = "scene";
  detail::check_keys(j, {"seed", "frame_count", "width", "height", "min_contrast", "background", "actors"}, where);
  SceneScript s;
  detail::read_opt(j, "seed", s.seed, where);
  detail::read_opt(j, "frame_count", s.frame_count, where);
  detail::read_opt(j, "width", s.width, where);
  detail::read_opt(j, "height", s.height, where);
  detail::read_opt(j, "min_contrast", s.min_contrast, where);
  if (j.contains("background")) {
    const auto& b = j["background"];
    detail::check_keys(b, {"base", "noise"}, "scene.background");
    if (b.contains("base")) s.background.base = detail::rgb_from(b["base"], "scene.background.base");
    detail::read_opt(b, "noise", s.background.noise, "scene.background");
  }
  if (j.contains("actors")) {
    if (!j["actors"].is_array()) throw InvalidInput("scene.actors must be a list");
    for (std::size_t i = 0; i < j["actors"].size(); ++i) {
      const auto& ja = j["actors"][i];
      const std::string at = "scene.actors[" + std::to_string(i) + "]";
      detail::check_keys(ja, {"color", "width", "height", "waypoints", "speeds", "jump_frame", "jump_factor",
                              "edge_width"},
                         at);
      ActorScript a;
      if (!ja.contains("color")) throw InvalidInput(at + ": missing 'color'");
      a.color = detail::rgb_from(ja["color"], at);
      detail::read_opt(ja, "width", a.width, at);
      detail::read_opt(ja, "height", a.height, at);
      if (!ja.contains("waypoints") || !ja["waypoints"].is_array()) throw InvalidInput(at + ": missing 'waypoints'");
      for (const auto& p : ja["waypoints"]) a.waypoints.push_back(detail::point_from(p, at));
      detail::read_opt(ja, "speeds", a.speeds, at);
      if (ja.contains("jump_frame") && !ja["jump_frame"].is_null()) {
        long jf = 0;
        detail::read_opt(ja, "jump_frame", jf, at);
        a.jump_frame = jf;
      }
      detail::read_opt(ja, "jump_factor", a.jump_factor, at);
      detail::read_opt(ja, "edge_width", a.edge_width, at);
      s.actors.push_back(std::move(a));
    }
  }
  validate(s);
  return s;
}

// --- ground truth -------------------------------------------------------------

[[nodiscard]] inline json to_json(const GroundTruth& gt) {
  json frames = json::array();
  for (const auto& f : gt.frames) {
    json objects = json::array();
    for (const auto& o : f.objects) {
      objects.push_back({{"id", o.id}, {"box", {o.box.min_x, o.box.min_y, o.box.max_x, o.box.max_y}}});
    }
    frames.push_back({{"index", f.index}, {"objects", objects}, {"suspicious", f.suspicious}});
  }
  return {{"width", gt.width}, {"height", gt.height}, {"frames", frames}};
}

[[nodiscard]] inline GroundTruth ground_truth_from_json(const json& j) {
  const std::string where = "ground truth";
  detail::check_keys(j, {"width", "height", "frames"}, where);
  GroundTruth gt;
  detail::read_opt(j, "width", gt.width, where);
  detail::read_opt(j, "height", gt.height, where);
  if (gt.width <= 0 || gt.height <= 0) throw InvalidInput(where + ": width and height must be positive");
  if (!j.contains("frames") || !j["frames"].is_array()) throw InvalidInput(where + ": missing 'frames'");
  for (const auto& jf : j["frames"]) {
    detail::check_keys(jf, {"index", "objects", "suspicious"}, where + " frame");
    FrameTruth ft;
    if (!jf.contains("index")) throw InvalidInput(where + ": frame without 'index'");
    detail::read_opt(jf, "index", ft.index, where);
    detail::read_opt(jf, "suspicious", ft.suspicious, where);
    if (jf.contains("objects")) {
      for (const auto& jo : jf["objects"]) {
        detail::check_keys(jo, {"id", "box"}, where + " object");
        TruthObject o;
        detail::read_opt(jo, "id", o.id, where);
        std::vector<int> b;
        detail::read_opt(jo, "box", b, where);
        if (b.size() != 4 || b[0] > b[2] || b[1] > b[3]) {
          throw InvalidInput(where + ": box must be [min_x, min_y, max_x, max_y]");
        }
        o.box = {b[0], b[1], b[2], b[3]};
        ft.objects.push_back(o);
      }
    }
    gt.frames.push_back(std::move(ft));
  }
  return gt;
}

// --- events, tracks, reports -------------------------------------------------

[[nodiscard]] inline json to_json(const SuspicionEvent& e) {
  return {{"frame_index", e.frame_index}, {"track_id", e.track_id.value}, {"delta_speed", e.delta_speed},
          {"threshold", e.threshold_used}, {"center_x", e.center.x},    {"center_y", e.center.y}};
}

[[nodiscard]] inline SuspicionEvent event_from_json(const json& j) {
  SuspicionEvent e;
  try {
    e.frame_index = j.at("frame_index").get<long>();
    e.track_id = TrackId{j.at("track_id").get<std::uint64_t>()};
    e.delta_speed = j.at("delta_speed").get<double>();
    e.threshold_used = j.at("threshold").get<double>();
    e.center = {j.at("center_x").get<double>(), j.at("center_y").get<double>()};
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("event: ") + ex.what());
  }
  return e;
}

[[nodiscard]] inline json to_json(const TrackRecord& r, long frame_index) {
  json j{{"frame_index", frame_index},
         {"track_id", r.id.value},
         {"center_x", r.last_center.x},
         {"center_y", r.last_center.y},
         {"size", r.size},
         {"appear_count", r.appear_count},
         {"first_seen_frame", r.first_seen_frame},
         {"last_seen_frame", r.last_seen_frame}};
  j["speed"] = r.speed ? json(*r.speed) : json(nullptr);
  if (r.prev_center) j["prev_center"] = {r.prev_center->x, r.prev_center->y};
  return j;
}

[[nodiscard]] inline json to_json(const EvalReport& r) {
  return {{"frames", r.frames},
          {"true_matches", r.true_matches},
          {"false_matches", r.false_matches},
          {"match_score", r.match_score ? json(*r.match_score) : json(nullptr)},
          {"n_suspicious_flagged", r.n_suspicious_flagged},
          {"n_false_alerts", r.n_false_alerts},
          {"false_alert_rate", r.false_alert_rate},
          {"mean_bottom_up_ms", r.mean_bottom_up_ms},
          {"mean_total_ms", r.mean_total_ms},
          {"mean_region_coverage", r.mean_region_coverage}};
}

// --- files --------------------------------------------------------------------

[[nodiscard]] inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// One compact JSON document per line.
inline void write_jsonl(std::ostream& os, const json& j) { os << j.dump() << '\n'; }

}  // namespace vatt
