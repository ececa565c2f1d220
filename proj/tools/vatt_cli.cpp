// Command line driver: run the attention pipeline over a frame source, or
// render a synthetic scene to disk.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef VATT_WITH_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

#include "vatt/benchmark.hpp"
#include "vatt/config.hpp"
#include "vatt/io.hpp"
#include "vatt/pipeline.hpp"
#include "vatt/serialize.hpp"

using namespace vatt;

namespace {

/// Bad command line or config; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<Frame> next() = 0;
};

class RawSource : public FrameSource {
 public:
  explicit RawSource(const fs::path& p) : reader_(p) {}
  std::optional<Frame> next() override { return reader_.next(); }

 private:
  RawReader reader_;
};

std::vector<std::string> image_extensions() {
  std::vector<std::string> ext{".ppm", ".pgm", ".pnm"};
#ifdef VATT_WITH_OPENCV
  for (const char* e : {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}) ext.emplace_back(e);
#endif
  return ext;
}

Frame load_image(const fs::path& p, long index) {
  if (is_pnm_extension(lower_extension(p))) return read_pnm(p, index);
#ifdef VATT_WITH_OPENCV
  const cv::Mat m = cv::imread(p.string(), cv::IMREAD_COLOR);
  if (m.empty() || m.depth() != CV_8U) throw InvalidInput("cannot decode " + p.string());
  Frame f{Plane<Rgb>(m.cols, m.rows), index};
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<unsigned char>(y);
    for (int x = 0; x < m.cols; ++x) {
      f.pixels(x, y) = {from_byte(row[3 * x + 2]), from_byte(row[3 * x + 1]), from_byte(row[3 * x])};
    }
  }
  return f;
#else
  throw InvalidInput("unsupported image format: " + p.string());
#endif
}

/// Lexicographically ordered image files; one decoded frame in memory at a time.
class DirectorySource : public FrameSource {
 public:
  explicit DirectorySource(const fs::path& dir) : files_(list_frames(dir, image_extensions())) {
    if (files_.empty()) throw InvalidInput("no image files in " + dir.string());
  }
  std::optional<Frame> next() override {
    if (next_ >= files_.size()) return std::nullopt;
    const long index = static_cast<long>(next_);
    Frame f = load_image(files_[next_++], index);
    if (index == 0) {
      width_ = f.width();
      height_ = f.height();
    } else if (f.width() != width_ || f.height() != height_) {
      throw InvalidInput(files_[next_ - 1].string() + ": frame size differs from the first frame");
    }
    return f;
  }

 private:
  std::vector<fs::path> files_;
  std::size_t next_ = 0;
  int width_ = 0;
  int height_ = 0;
};

class SceneSource : public FrameSource {
 public:
  explicit SceneSource(SceneScript s) : renderer_(std::move(s)) {}
  std::optional<Frame> next() override {
    if (t_ >= renderer_.frame_count()) return std::nullopt;
    return renderer_.frame(t_++);
  }
  [[nodiscard]] const SceneRenderer& renderer() const { return renderer_; }

 private:
  SceneRenderer renderer_;
  long t_ = 0;
};

/// "benchmark:N", "localization", or a JSON script path.
SceneScript resolve_scene(const std::string& name) {
  if (name == "localization") return localization_scene();
  const std::string prefix = "benchmark:";
  if (name.rfind(prefix, 0) == 0) {
    const auto suite = benchmark_suite();
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoul(name.substr(prefix.size()), &used);
      if (used != name.size() - prefix.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("bad scene name '" + name + "'");
    }
    if (n >= suite.size()) {
      throw UsageError("benchmark scene index must be < " + std::to_string(suite.size()));
    }
    return suite[n];
  }
  try {
    return scene_from_json(read_json_file(name));
  } catch (const InvalidScript& e) {
    throw InvalidInput(name + ": " + e.what());
  }
}

void draw_outline(Plane<Rgb>& img, const BoundingBox& b, Rgb color) {
  for (int x = b.min_x; x <= b.max_x; ++x) {
    img(x, b.min_y) = color;
    img(x, b.max_y) = color;
  }
  for (int y = b.min_y; y <= b.max_y; ++y) {
    img(b.min_x, y) = color;
    img(b.max_x, y) = color;
  }
}

std::string numbered(const char* stem, long index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06ld%s", stem, index, ext);
  return buf;
}

struct RunOptions {
  std::string input;
  std::string seed_scene;
  std::string output_dir;
  std::string config_path;
  std::vector<std::string> settings;
  std::string ground_truth;
  bool emit_saliency = false;
  bool emit_report = false;
  bool dump_tracks = false;
  bool no_frames = false;
  std::optional<int> max_regions;
};

PipelineConfig build_config(const RunOptions& o) {
  PipelineConfig config;
  try {
    if (!o.config_path.empty()) config = load_config(o.config_path, config);
    for (const auto& s : o.settings) apply_assignment(config, s);
    if (o.max_regions) config.ior.max_regions = *o.max_regions;
    config.validate();
  } catch (const InvalidConfig& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return config;
}

int run(const RunOptions& o) {
  const PipelineConfig config = build_config(o);
  if (o.input.empty() == o.seed_scene.empty()) throw UsageError("give exactly one of --input or --seed-scene");

  std::unique_ptr<FrameSource> source;
  std::optional<GroundTruth> truth;
  if (!o.seed_scene.empty()) {
    auto scene = std::make_unique<SceneSource>(resolve_scene(o.seed_scene));
    truth = scene->renderer().ground_truth();
    source = std::move(scene);
  } else if (fs::is_directory(o.input)) {
    source = std::make_unique<DirectorySource>(o.input);
  } else if (fs::is_regular_file(o.input) && is_raw_stream(o.input)) {
    source = std::make_unique<RawSource>(o.input);
  } else if (!fs::exists(o.input)) {
    throw InvalidInput("input not found: " + o.input);
  } else {
    throw InvalidInput(o.input + ": expected a directory of images or a raw VRGB stream");
  }
  if (!o.ground_truth.empty()) truth = ground_truth_from_json(read_json_file(o.ground_truth));

  const fs::path out_dir = o.output_dir;
  fs::create_directories(out_dir);
  std::ofstream events(out_dir / "events.jsonl", std::ios::trunc);
  std::ofstream regions(out_dir / "regions.jsonl", std::ios::trunc);
  if (!events || !regions) throw InvalidInput("cannot write into " + out_dir.string());

  Pipeline pipeline(config);
  Evaluation eval(truth ? &*truth : nullptr);
  long frames = 0;
  long last_index = -1;
  while (auto frame = source->next()) {
    FrameResult r = pipeline.process(*frame);
    eval.add(r);
    ++frames;
    last_index = frame->index;

    std::vector<bool> flagged(r.descriptors.size(), false);
    for (const auto& e : r.events) {
      write_jsonl(events, to_json(e));
      for (std::size_t i = 0; i < r.track_of.size(); ++i) flagged[i] = flagged[i] || r.track_of[i] == e.track_id;
    }

    json row{{"frame_index", frame->index}, {"regions", json::array()}};
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
      const auto& reg = r.regions[i];
      row["regions"].push_back({{"track_id", r.track_of[i].value},
                                {"matched", r.assignments[i].track.has_value()},
                                {"score", r.assignments[i].score},
                                {"suspicious", static_cast<bool>(flagged[i])},
                                {"bbox", {reg.bbox.min_x, reg.bbox.min_y, reg.bbox.max_x, reg.bbox.max_y}},
                                {"center", {reg.center.x, reg.center.y}},
                                {"size", reg.size()},
                                {"peak_value", reg.peak_value}});
    }
    write_jsonl(regions, row);

    if (!o.no_frames) {
      Plane<Rgb> annotated = r.working.pixels;
      // Plain regions first so a suspicious outline is never painted over.
      for (std::size_t i = 0; i < r.regions.size(); ++i) {
        if (!flagged[i]) draw_outline(annotated, r.regions[i].bbox, {1.0, 0.0, 0.0});
      }
      for (std::size_t i = 0; i < r.regions.size(); ++i) {
        if (flagged[i]) draw_outline(annotated, r.regions[i].bbox, {0.0, 0.0, 1.0});
      }
      write_ppm(out_dir / numbered("frame", frame->index, ".ppm"), annotated);
    }
    if (o.emit_saliency) write_pgm(out_dir / numbered("saliency", frame->index, ".pgm"), r.saliency.values);
  }
  events.flush();
  regions.flush();
  if (!events || !regions) throw InvalidInput("write failed in " + out_dir.string());
  if (frames == 0) throw InvalidInput("input contains no frames");

  if (o.dump_tracks) {
    std::ofstream tracks(out_dir / "tracks.jsonl", std::ios::trunc);
    for (const auto& rec : pipeline.memory().records()) write_jsonl(tracks, to_json(rec, last_index));
  }
  if (truth || o.emit_report) {
    json rep = to_json(eval.report());
    if (truth) {
      const auto recall = eval.recall();
      rep["scripted_jumps"] = recall.onsets;
      rep["jumps_detected"] = recall.detected;
      rep["match_opportunities"] = match_opportunities(*truth);
    }
    write_json_file(out_dir / "report.json", rep);
  }
  std::cerr << "vatt: " << frames << " frames, " << eval.events().size() << " suspicion events\n";
  return 0;
}

struct SynthOptions {
  std::string scene;
  std::string output;
  std::string truth;
  std::string script;
};

int synth(const SynthOptions& o) {
  const SceneScript script = resolve_scene(o.scene);
  SceneRenderer renderer(script);
  {
    RawWriter writer(o.output, script.width, script.height);
    for (long t = 0; t < renderer.frame_count(); ++t) writer.write(renderer.frame(t));
    writer.close();
  }
  if (!o.truth.empty()) write_json_file(o.truth, to_json(renderer.ground_truth()));
  if (!o.script.empty()) write_json_file(o.script, to_json(script));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual attention pipeline: spectral saliency, inhibition of return, tracking, suspicion"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Process a frame sequence");
  run_cmd->add_option("--input", ro.input, "Directory of images or a raw VRGB stream");
  run_cmd->add_option("--seed-scene", ro.seed_scene,
                      "Render a synthetic scene inline: benchmark:N, localization, or a scene JSON file");
  run_cmd->add_option("--output-dir", ro.output_dir, "Where to write results")->required();
  run_cmd->add_option("--config", ro.config_path, "Flat key=value config file");
  run_cmd->add_option("--set", ro.settings, "Override one config key (key=value); repeatable");
  run_cmd->add_option("--ground-truth", ro.ground_truth, "Ground truth JSON (enables scoring)");
  run_cmd->add_flag("--emit-saliency", ro.emit_saliency, "Write saliency maps as PGM");
  run_cmd->add_flag("--emit-report", ro.emit_report, "Write report.json even without ground truth");
  run_cmd->add_flag("--dump-tracks", ro.dump_tracks, "Write the final track memory to tracks.jsonl");
  run_cmd->add_flag("--no-frames", ro.no_frames, "Skip annotated frame output");
  run_cmd->add_option("--max-regions", ro.max_regions, "Regions kept per frame (overrides config)");

  SynthOptions so;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic scene to a raw VRGB stream");
  synth_cmd->add_option("--scene", so.scene, "benchmark:N, localization, or a scene JSON file")->required();
  synth_cmd->add_option("--output", so.output, "Raw stream path")->required();
  synth_cmd->add_option("--truth", so.truth, "Ground truth JSON path");
  synth_cmd->add_option("--script", so.script, "Write the resolved scene script as JSON");

  auto* config_cmd = app.add_subcommand("config", "Print every config key with its default value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return run(ro);
    if (*synth_cmd) return synth(so);
    if (*config_cmd) {
      std::cout << config_text(PipelineConfig{});
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "vatt: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vatt: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
