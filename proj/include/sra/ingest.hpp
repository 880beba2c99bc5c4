#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sra/types.hpp"

namespace sra {

enum class Activity { None, LookTunnel, Walk, Stand };

const char* to_string(Activity a);
Activity activity_from_string(const std::string& s);  // unknown -> None

struct FrameObservation {
  std::int64_t frame_index = 0;
  int person_id = 0;
  Rect bbox;
  std::optional<Vec2> left_leg;
  std::optional<Vec2> right_leg;
  Activity activity = Activity::None;
};

struct PersonTimeline {
  int person_id = 0;
  std::vector<FrameObservation> samples;  // sorted by frame_index, no dups
  std::vector<Vec2> foot_points;          // one per sample
  std::string video_id;
  std::optional<int> label;  // 0 = control, 1 = at risk
};

// Ankle midpoint; single present leg; else bbox bottom-center.
Vec2 derive_foot_point(const FrameObservation& obs);

// Newline-delimited JSON records, one per (frame, person). Timelines come
// back sorted by person_id. Unknown record fields are ignored.
std::vector<PersonTimeline> parse_stream(std::istream& in,
                                         const std::string& video_id = "");
std::vector<PersonTimeline> parse_stream_text(const std::string& text,
                                              const std::string& video_id = "");
std::vector<PersonTimeline> load_stream(const std::string& path,
                                        const std::string& video_id = "");

std::string serialize_stream(const std::vector<PersonTimeline>& timelines);

std::string observation_to_json_line(const FrameObservation& obs);

// labels CSV: header "video_id,person_id,label", label in {0, 1}
using LabelMap = std::map<std::pair<std::string, int>, int>;
LabelMap load_labels(const std::string& path);
void save_labels(const LabelMap& labels, const std::string& path);
void apply_labels(std::vector<PersonTimeline>& timelines, const LabelMap& labels);

}  // namespace sra
