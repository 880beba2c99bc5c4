#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sra/indicators.hpp"
#include "sra/ingest.hpp"
#include "sra/scene.hpp"

namespace sra {

struct NoiseSpec {
  double pos_jitter_px = 0.0;   // gaussian sigma on emitted leg keypoints
  double dropout_prob = 0.0;    // per-record drop probability
  double label_flip_prob = 0.0; // agent keeps its label but acts as the other class
};

struct BehaviorIntensity {
  int pacing_cycles = 3;
  double yellow_dwell_s = 8.0;
  int look_tunnel_events = 3;
  double far_end_prob = 0.5;
};

struct ScenarioSpec {
  SceneConfig scene;
  std::string video_id = "sim-0";
  int n_control = 1;
  int n_at_risk = 1;
  double duration_s = 300.0;
  NoiseSpec noise;
  BehaviorIntensity intensity;
  std::uint64_t seed = 0;

  void validate() const;
};

// Pre-noise per-frame state for one agent, with the indicator values the
// engine is expected to reproduce on the noise-free stream. The position
// risk component depends on a map, so `expected.pr` stays 0 and the exact
// platform trajectory is logged instead.
struct PersonTruth {
  int person_id = 0;
  int label = 0;           // assigned class
  int behavior_label = 0;  // class actually scripted (differs when flipped)
  std::vector<std::int64_t> frames;
  std::vector<int> zone;  // 0 = A, 1 = B, 2 = other
  std::vector<std::uint8_t> on_yellow;
  std::vector<Activity> activity;
  std::vector<Vec2> platform_trajectory;
  IndicatorVector expected;
};

struct ScenarioResult {
  SceneConfig scene;
  std::string video_id;
  std::vector<PersonTimeline> stream;       // noisy observations
  std::vector<PersonTimeline> clean_stream; // pre-noise observations
  std::vector<PersonTruth> truth;
  LabelMap labels;
};

// Camera view of a 4 m x 25 m platform; homography estimated from the four
// corner correspondences, offset_d calibrated to a 2 m far-end depth.
SceneConfig default_scene();

ScenarioResult generate(const ScenarioSpec& spec);

// profile "smoke": 8 tiny scenarios. profile "paper-shaped": 122 scenarios
// totaling 190 control and 66 at-risk individuals with moderate noise.
std::vector<ScenarioSpec> benchmark_corpus(const std::string& profile,
                                           std::uint64_t seed);

std::string truth_to_json_text(const ScenarioResult& result);

}  // namespace sra
