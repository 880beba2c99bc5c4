#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sra/geometry.hpp"
#include "sra/heatmap.hpp"
#include "sra/ingest.hpp"
#include "sra/scene.hpp"

namespace sra {

// The eight-component per-person feature vector, accumulated over a window.
struct IndicatorVector {
  double pr = 0.0;  // position risk, [0, 1]
  bool cr = false;  // walk/stand on the yellow line
  int ncr = 0;      // yellow line crossings
  double ty = 0.0;  // time on the yellow line, seconds
  double ly = 0.0;  // longest yellow line segment, seconds
  int bf = 0;       // back-and-forth count
  bool lt = false;  // look tunnel
  bool e = false;   // entered the far-end zone

  std::array<double, 8> as_features() const {
    return {pr,        cr ? 1.0 : 0.0, static_cast<double>(ncr), ty,
            ly,        static_cast<double>(bf), lt ? 1.0 : 0.0,
            e ? 1.0 : 0.0};
  }
  static const std::array<std::string, 8>& feature_names();
  bool operator==(const IndicatorVector& o) const = default;
};

struct WindowSpec {
  std::int64_t tau = 0;  // window length in frames; 0 = whole timeline
  std::int64_t stride = 1;
};

struct IndicatorConfig {
  int hysteresis_frames = 3;  // debounce for zone and yellow transitions
  int lt_min_events = 1;      // gaze runs needed to set LT
};

enum class ZoneTag { A, B, Other };

struct ZoneVisit {
  ZoneTag zone = ZoneTag::Other;
  std::int64_t enter_frame = 0;
  std::int64_t exit_frame = 0;
};

// Per-frame zone of the foot point compressed into debounced visits.
std::vector<ZoneVisit> zone_sequence(const PersonTimeline& timeline,
                                     const ZonePartition& partition,
                                     int hysteresis_frames = 3);

// Overlapping A-B-A / B-A-B triples over the A/B-restricted visit string.
int count_back_and_forth(const std::vector<ZoneTag>& visits);

IndicatorVector compute_indicators(const PersonTimeline& timeline,
                                   const ZonePartition& partition,
                                   const HeatmapGrid& position_risk_map,
                                   const SceneConfig& cfg,
                                   const WindowSpec& window = {},
                                   const IndicatorConfig& icfg = {});

struct SlidingResult {
  std::vector<std::pair<std::int64_t, IndicatorVector>> windows;
  bool truncated = false;  // tau exceeded the timeline span
};

SlidingResult sliding_indicators(const PersonTimeline& timeline,
                                 const ZonePartition& partition,
                                 const HeatmapGrid& position_risk_map,
                                 const SceneConfig& cfg,
                                 const WindowSpec& window,
                                 const IndicatorConfig& icfg = {});

struct IndicatorRow {
  std::string video_id;
  int person_id = 0;
  std::int64_t window_end = 0;
  IndicatorVector indicators;
  std::optional<int> label;
};

std::string indicator_csv_header();
std::string indicator_row_to_csv(const IndicatorRow& row);
std::vector<IndicatorRow> load_indicator_csv(const std::string& path);
void save_indicator_csv(const std::vector<IndicatorRow>& rows,
                        const std::string& path);

}  // namespace sra
