#include "sra/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "sra/geometry.hpp"
#include "sra/projection.hpp"

namespace sra {

namespace {

std::vector<EvalItem> timeline_items(const SceneConfig& scene,
                                     const std::vector<PersonTimeline>& timelines) {
  ZonePartition part = build_zone_partition(scene);
  HeatmapGrid zero_map = make_grid(scene.grid);
  std::vector<EvalItem> items;
  items.reserve(timelines.size());
  for (const PersonTimeline& tl : timelines) {
    if (!tl.label) {
      throw Error(ErrorKind::Data, "missing label for " + tl.video_id +
                                       ":" + std::to_string(tl.person_id));
    }
    EvalItem item;
    item.video_id = tl.video_id;
    item.person_id = tl.person_id;
    item.label = *tl.label;
    item.platform_points.reserve(tl.foot_points.size());
    for (const Vec2& fp : tl.foot_points) {
      item.platform_points.push_back(apply(scene.homography, fp));
    }
    item.indicators = compute_indicators(tl, part, zero_map, scene);
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

std::vector<EvalItem> scenario_eval_items(const ScenarioResult& result) {
  return timeline_items(result.scene, result.stream);
}

std::vector<EvalItem> stream_eval_items(
    const SceneConfig& scene, const std::vector<PersonTimeline>& timelines) {
  return timeline_items(scene, timelines);
}

std::vector<EvalItem> corpus_eval_items(const std::vector<ScenarioSpec>& specs,
                                        int jobs) {
  std::vector<std::vector<EvalItem>> per(specs.size());
  auto work = [&](std::size_t i) { per[i] = scenario_eval_items(generate(specs[i])); };

  int threads = std::clamp(jobs, 1, 256);
  if (threads <= 1 || specs.size() <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto runner = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= specs.size()) break;
        work(i);
      }
    };
    std::vector<std::thread> pool;
    auto n = std::min<std::size_t>(static_cast<std::size_t>(threads), specs.size());
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
  }

  std::vector<EvalItem> items;
  for (auto& chunk : per) {
    for (auto& item : chunk) items.push_back(std::move(item));
  }
  return items;
}

CvReport evaluate_profile(const std::string& profile, std::uint64_t seed,
                          const CrossValidateConfig& cfg, int jobs) {
  std::vector<ScenarioSpec> specs = benchmark_corpus(profile, seed);
  CrossValidateConfig local = cfg;
  local.seed = seed;
  local.grid = specs.front().scene.grid;
  std::vector<EvalItem> items = corpus_eval_items(specs, jobs);
  return cross_validate(items, local);
}

}  // namespace sra
