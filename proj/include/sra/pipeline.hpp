#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sra/evaluation.hpp"
#include "sra/simulator.hpp"

namespace sra {

// One evaluation row per observed person: whole-timeline indicators computed
// against a zero position-risk map (the real component is rebuilt per fold
// inside the protocol) plus the projected platform trajectory.
std::vector<EvalItem> scenario_eval_items(const ScenarioResult& result);

// Timelines must already carry labels.
std::vector<EvalItem> stream_eval_items(
    const SceneConfig& scene, const std::vector<PersonTimeline>& timelines);

// Scenarios are independent, so generation fans out over `jobs` threads; the
// row order never depends on scheduling.
std::vector<EvalItem> corpus_eval_items(const std::vector<ScenarioSpec>& specs,
                                        int jobs = 1);

// Generate the named corpus and run the grouped k-fold protocol on it. The
// seed drives both corpus generation and the protocol's own randomness.
CvReport evaluate_profile(const std::string& profile, std::uint64_t seed,
                          const CrossValidateConfig& cfg, int jobs = 1);

}  // namespace sra
