#include "sra/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

namespace sra {

namespace {

using nlohmann::json;

bool inside_expanded_bbox(const Vec2& p, const Rect& b) {
  double cx = b.x + b.w / 2.0;
  double cy = b.y + b.h / 2.0;
  double hw = b.w * 1.5 / 2.0;
  double hh = b.h * 1.5 / 2.0;
  return p.x >= cx - hw && p.x <= cx + hw && p.y >= cy - hh && p.y <= cy + hh;
}

std::optional<Vec2> keypoint_from(const json& j, std::size_t line,
                                  const char* name) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " +
                                      name + " must be [x, y] or null");
  return Vec2{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

const char* to_string(Activity a) {
  switch (a) {
    case Activity::LookTunnel: return "LookTunnel";
    case Activity::Walk: return "Walk";
    case Activity::Stand: return "Stand";
    case Activity::None: break;
  }
  return "None";
}

Activity activity_from_string(const std::string& s) {
  if (s == "LookTunnel") return Activity::LookTunnel;
  if (s == "Walk") return Activity::Walk;
  if (s == "Stand") return Activity::Stand;
  return Activity::None;
}

Vec2 derive_foot_point(const FrameObservation& obs) {
  if (obs.left_leg && obs.right_leg)
    return (*obs.left_leg + *obs.right_leg) / 2.0;
  if (obs.left_leg) return *obs.left_leg;
  if (obs.right_leg) return *obs.right_leg;
  return {obs.bbox.x + obs.bbox.w / 2.0, obs.bbox.y + obs.bbox.h};
}

std::vector<PersonTimeline> parse_stream(std::istream& in,
                                         const std::string& video_id) {
  std::map<int, PersonTimeline> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object())
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": record must be an object");
    for (const char* field : {"f", "id", "bbox"})
      if (!j.contains(field))
        throw Error(ErrorKind::Schema, "line " + std::to_string(line_no) +
                                           ": missing mandatory field '" +
                                           field + "'");

    FrameObservation obs;
    try {
      obs.frame_index = j["f"].get<std::int64_t>();
      obs.person_id = j["id"].get<int>();
      const json& bb = j["bbox"];
      if (!bb.is_array() || bb.size() != 4)
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": bbox must be [x, y, w, h]");
      obs.bbox = {bb[0].get<double>(), bb[1].get<double>(),
                  bb[2].get<double>(), bb[3].get<double>()};
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (obs.frame_index < 0)
      throw Error(ErrorKind::Schema,
                  "line " + std::to_string(line_no) + ": negative frame index");
    if (j.contains("ll")) obs.left_leg = keypoint_from(j["ll"], line_no, "ll");
    if (j.contains("rl")) obs.right_leg = keypoint_from(j["rl"], line_no, "rl");
    if (j.contains("act") && !j["act"].is_null()) {
      if (!j["act"].is_string())
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": act must be a string or null");
      obs.activity = activity_from_string(j["act"].get<std::string>());
    }
    for (const auto& kp : {obs.left_leg, obs.right_leg})
      if (kp && !inside_expanded_bbox(*kp, obs.bbox))
        throw Error(ErrorKind::Schema,
                    "line " + std::to_string(line_no) +
                        ": leg keypoint outside the expanded bbox");

    PersonTimeline& tl = by_id[obs.person_id];
    if (!tl.samples.empty() &&
        obs.frame_index <= tl.samples.back().frame_index)
      throw Error(ErrorKind::Ordering,
                  "line " + std::to_string(line_no) + ": frame index " +
                      std::to_string(obs.frame_index) +
                      " not increasing for person " +
                      std::to_string(obs.person_id));
    tl.person_id = obs.person_id;
    tl.video_id = video_id;
    tl.foot_points.push_back(derive_foot_point(obs));
    tl.samples.push_back(std::move(obs));
  }

  std::vector<PersonTimeline> out;
  out.reserve(by_id.size());
  for (auto& [id, tl] : by_id) out.push_back(std::move(tl));
  return out;
}

std::vector<PersonTimeline> parse_stream_text(const std::string& text,
                                              const std::string& video_id) {
  std::istringstream in(text);
  return parse_stream(in, video_id);
}

std::vector<PersonTimeline> load_stream(const std::string& path,
                                        const std::string& video_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string vid = video_id;
  if (vid.empty()) {
    // default video id: file stem
    std::string base = path;
    auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    vid = base;
  }
  return parse_stream(in, vid);
}

std::string observation_to_json_line(const FrameObservation& obs) {
  json j;
  j["f"] = obs.frame_index;
  j["id"] = obs.person_id;
  j["bbox"] = {obs.bbox.x, obs.bbox.y, obs.bbox.w, obs.bbox.h};
  j["ll"] = obs.left_leg ? json::array({obs.left_leg->x, obs.left_leg->y})
                         : json(nullptr);
  j["rl"] = obs.right_leg ? json::array({obs.right_leg->x, obs.right_leg->y})
                          : json(nullptr);
  j["act"] = obs.activity == Activity::None ? json(nullptr)
                                            : json(to_string(obs.activity));
  return j.dump();
}

std::string serialize_stream(const std::vector<PersonTimeline>& timelines) {
  // frame-major interleaving, ties broken by person id
  std::vector<const FrameObservation*> all;
  for (const PersonTimeline& tl : timelines)
    for (const FrameObservation& obs : tl.samples) all.push_back(&obs);
  std::stable_sort(all.begin(), all.end(),
                   [](const FrameObservation* a, const FrameObservation* b) {
                     if (a->frame_index != b->frame_index)
                       return a->frame_index < b->frame_index;
                     return a->person_id < b->person_id;
                   });
  std::string out;
  for (const FrameObservation* obs : all) {
    out += observation_to_json_line(*obs);
    out += '\n';
  }
  return out;
}

LabelMap load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  LabelMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line_no == 1 && line.rfind("video_id", 0) == 0))
      continue;
    std::stringstream ss(line);
    std::string vid, pid, lab;
    if (!std::getline(ss, vid, ',') || !std::getline(ss, pid, ',') ||
        !std::getline(ss, lab, ','))
      throw Error(ErrorKind::Parse,
                  path + " line " + std::to_string(line_no) + ": bad row");
    try {
      int p = std::stoi(pid);
      int l = std::stoi(lab);
      if (l != 0 && l != 1)
        throw Error(ErrorKind::Schema, path + " line " +
                                           std::to_string(line_no) +
                                           ": label must be 0 or 1");
      out[{vid, p}] = l;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse,
                  path + " line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

void save_labels(const LabelMap& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "video_id,person_id,label\n";
  for (const auto& [key, label] : labels)
    out << key.first << ',' << key.second << ',' << label << '\n';
}

void apply_labels(std::vector<PersonTimeline>& timelines,
                  const LabelMap& labels) {
  for (PersonTimeline& tl : timelines) {
    auto it = labels.find({tl.video_id, tl.person_id});
    if (it != labels.end()) tl.label = it->second;
  }
}

}  // namespace sra
