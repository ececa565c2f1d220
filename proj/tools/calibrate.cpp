// Sweeps the tracker thresholds over the bundled benchmark and prints the
// acceptance numbers per setting.
//
//   calibrate                                  grid sweep
//   calibrate MU_FAR MU_NEAR EPS_FAR EPS_NEAR  one setting
//
// Env: VATT_SEED_OFFSET=k adds k to every scene seed, VATT_NOISE=a overrides
// background noise, VATT_EDGE=n gives every actor an n-px soft edge,
// VATT_SCENES=1 prints per-scene lines.
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "vatt/benchmark.hpp"

using namespace vatt;

namespace {

std::vector<SceneScript> suite_from_env() {
  auto suite = benchmark_suite();
  for (auto& scene : suite) {
    if (const char* e = std::getenv("VATT_NOISE")) scene.background.noise = std::atof(e);
    if (const char* e = std::getenv("VATT_SEED_OFFSET")) scene.seed += std::strtoull(e, nullptr, 10);
    if (const char* e = std::getenv("VATT_EDGE")) {
      for (auto& a : scene.actors) a.edge_width = std::atoi(e);
    }
  }
  return suite;
}

void report(const PipelineConfig& c, const SuiteOutcome& s) {
  const bool per_scene = std::getenv("VATT_SCENES") != nullptr;
  if (per_scene) {
    for (std::size_t i = 0; i < s.scenes.size(); ++i) {
      const auto& o = s.scenes[i];
      std::printf("  scene %zu: true=%ld false=%ld flagged=%ld false_alerts=%ld recall=%ld/%ld cov=%.3f\n", i,
                  o.report.true_matches, o.report.false_matches, o.report.n_suspicious_flagged,
                  o.report.n_false_alerts, o.recall.detected, o.recall.onsets, o.report.mean_region_coverage);
    }
  }
  std::printf("mu=%.0f/%.0f eps=%.1f/%.1f  score=%.4f (%ld/%ld, opp %ld) false_alerts=%.3f (%ld/%ld) "
              "recall=%ld/%ld cov=%.3f\n",
              c.match.mu_far, c.match.mu_near, c.match.epsilon_far, c.match.epsilon_near,
              s.match_score().value_or(0.0), s.true_matches, s.true_matches + s.false_matches, s.opportunities,
              s.false_alert_rate(), s.false_alerts, s.flagged, s.detected, s.onsets, s.mean_coverage);
}

}  // namespace

int main(int argc, char** argv) {
  const auto suite = suite_from_env();
  PipelineConfig base;
  if (argc == 5) {
    base.match.mu_far = std::atof(argv[1]);
    base.match.mu_near = std::atof(argv[2]);
    base.match.epsilon_far = std::atof(argv[3]);
    base.match.epsilon_near = std::atof(argv[4]);
    report(base, run_suite(suite, base));
    return 0;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: calibrate [MU_FAR MU_NEAR EPS_FAR EPS_NEAR]\n");
    return 2;
  }
  for (double mu_far : {40.0, 80.0, 120.0, 200.0}) {
    for (double mu_scale : {1.0, 1.5}) {
      for (double eps_far : {2.0, 3.0, 3.5}) {
        PipelineConfig c = base;
        c.match.mu_far = mu_far;
        c.match.mu_near = mu_far * mu_scale;
        c.match.epsilon_far = eps_far;
        c.match.epsilon_near = eps_far + 1.0;
        report(c, run_suite(suite, c));
      }
    }
  }
}
