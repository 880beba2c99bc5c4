#include "sra/indicators.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sra/projection.hpp"

namespace sra {
namespace {

struct Run {
  int state = 0;
  std::size_t begin = 0;  // inclusive sample index
  std::size_t end = 0;    // inclusive sample index
  std::size_t length() const { return end - begin + 1; }
};

std::vector<Run> runs_of(const std::vector<int>& states) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!runs.empty() && runs.back().state == states[i]) {
      runs.back().end = i;
    } else {
      runs.push_back({states[i], i, i});
    }
  }
  return runs;
}

struct Visit {
  int state = 0;
  std::size_t enter = 0;  // inclusive sample index
  std::size_t exit = 0;   // inclusive sample index
  std::size_t span() const { return exit - enter + 1; }
};

// Hysteresis debouncer over maximal runs. A run matching the committed state
// always extends the open visit; a differing run commits only when it is at
// least `h` samples long, otherwise it is absorbed without moving the exit.
std::vector<Visit> debounce(const std::vector<int>& states, int initial,
                            int h) {
  std::vector<Visit> visits;
  int committed = initial;
  bool open = false;
  Visit cur;
  for (const Run& run : runs_of(states)) {
    if (run.state == committed) {
      if (open) {
        cur.exit = run.end;
      } else {
        open = true;
        cur = {committed, run.begin, run.end};
      }
    } else if (run.length() >= static_cast<std::size_t>(h)) {
      if (open) visits.push_back(cur);
      committed = run.state;
      open = true;
      cur = {committed, run.begin, run.end};
    }
    // else: short flicker away from the committed state, ignored
  }
  if (open) visits.push_back(cur);
  return visits;
}

std::optional<Vec2> try_project(const Homography& h, const Vec2& p) {
  try {
    return apply(h, p);
  } catch (const Error&) {
    return std::nullopt;
  }
}

constexpr int kZoneA = 0;
constexpr int kZoneB = 1;
constexpr int kZoneOther = 2;

int zone_state_of(const ZonePartition& partition, const Vec2& foot) {
  ZoneMembership m = locate(partition, foot);
  if (m.in_a) return kZoneA;
  if (m.in_b) return kZoneB;
  return kZoneOther;
}

// Track side of the yellow boundary. Leg keypoints are the better proxy for
// where the person stands, so use them when present and fall back to the
// bbox-derived foot point otherwise.
bool on_track_side(const ZonePartition& partition, const FrameObservation& obs,
                   const Vec2& foot) {
  if (obs.left_leg || obs.right_leg) {
    bool on = false;
    if (obs.left_leg) on = on || yellow_side(partition, *obs.left_leg) > 0.0;
    if (obs.right_leg) on = on || yellow_side(partition, *obs.right_leg) > 0.0;
    return on;
  }
  return yellow_side(partition, foot) > 0.0;
}

IndicatorVector compute_range(const PersonTimeline& timeline,
                              std::size_t i0, std::size_t i1,
                              const ZonePartition& partition,
                              const HeatmapGrid& position_risk_map,
                              const SceneConfig& cfg,
                              const IndicatorConfig& icfg) {
  IndicatorVector out;
  if (i0 >= i1) return out;
  const std::size_t n = i1 - i0;

  std::vector<int> zone_states(n), yellow_states(n), gaze_states(n);
  std::vector<Vec2> platform_points;
  platform_points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FrameObservation& obs = timeline.samples[i0 + i];
    const Vec2& foot = timeline.foot_points[i0 + i];
    zone_states[i] = zone_state_of(partition, foot);
    yellow_states[i] = on_track_side(partition, obs, foot) ? 1 : 0;
    gaze_states[i] = obs.activity == Activity::LookTunnel ? 1 : 0;
    if (locate(partition, foot).in_c) out.e = true;
    if (auto p = try_project(cfg.homography, foot)) {
      platform_points.push_back(*p);
    }
  }

  out.pr = position_risk(position_risk_map, platform_points);

  std::vector<Visit> yellow = debounce(yellow_states, 0, icfg.hysteresis_frames);
  std::erase_if(yellow, [](const Visit& v) { return v.state != 1; });
  out.ncr = static_cast<int>(yellow.size());
  std::size_t longest = 0;
  std::size_t total = 0;
  for (const Visit& v : yellow) {
    total += v.span();
    longest = std::max(longest, v.span());
    for (std::size_t i = v.enter; i <= v.exit && !out.cr; ++i) {
      Activity a = timeline.samples[i0 + i].activity;
      if (a == Activity::Walk || a == Activity::Stand) out.cr = true;
    }
  }
  out.ty = static_cast<double>(total) / cfg.fps;
  out.ly = static_cast<double>(longest) / cfg.fps;

  std::vector<Visit> zones =
      debounce(zone_states, kZoneOther, icfg.hysteresis_frames);
  std::vector<ZoneTag> tags;
  for (const Visit& v : zones) {
    if (v.state == kZoneA) tags.push_back(ZoneTag::A);
    if (v.state == kZoneB) tags.push_back(ZoneTag::B);
  }
  out.bf = count_back_and_forth(tags);

  int gaze_runs = 0;
  for (const Run& r : runs_of(gaze_states)) {
    if (r.state == 1) ++gaze_runs;
  }
  out.lt = gaze_runs >= icfg.lt_min_events;

  return out;
}

void validate_config(const IndicatorConfig& icfg) {
  if (icfg.hysteresis_frames < 1) {
    throw Error(ErrorKind::Parameter, "hysteresis_frames must be >= 1");
  }
  if (icfg.lt_min_events < 1) {
    throw Error(ErrorKind::Parameter, "lt_min_events must be >= 1");
  }
}

// Sample index range covering frame indices in [lo, hi].
std::pair<std::size_t, std::size_t> frame_range(const PersonTimeline& t,
                                                std::int64_t lo,
                                                std::int64_t hi) {
  auto begin = std::lower_bound(
      t.samples.begin(), t.samples.end(), lo,
      [](const FrameObservation& o, std::int64_t v) { return o.frame_index < v; });
  auto end = std::upper_bound(
      t.samples.begin(), t.samples.end(), hi,
      [](std::int64_t v, const FrameObservation& o) { return v < o.frame_index; });
  return {static_cast<std::size_t>(begin - t.samples.begin()),
          static_cast<std::size_t>(end - t.samples.begin())};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const std::array<std::string, 8>& IndicatorVector::feature_names() {
  static const std::array<std::string, 8> names = {
      "pr", "cr", "ncr", "ty", "ly", "bf", "lt", "e"};
  return names;
}

std::vector<ZoneVisit> zone_sequence(const PersonTimeline& timeline,
                                     const ZonePartition& partition,
                                     int hysteresis_frames) {
  if (hysteresis_frames < 1) {
    throw Error(ErrorKind::Parameter, "hysteresis_frames must be >= 1");
  }
  std::vector<int> states(timeline.samples.size());
  for (std::size_t i = 0; i < timeline.samples.size(); ++i) {
    states[i] = zone_state_of(partition, timeline.foot_points[i]);
  }
  std::vector<ZoneVisit> out;
  for (const Visit& v : debounce(states, kZoneOther, hysteresis_frames)) {
    if (v.state == kZoneOther) continue;
    out.push_back({v.state == kZoneA ? ZoneTag::A : ZoneTag::B,
                   timeline.samples[v.enter].frame_index,
                   timeline.samples[v.exit].frame_index});
  }
  return out;
}

int count_back_and_forth(const std::vector<ZoneTag>& visits) {
  std::vector<ZoneTag> ab;
  for (ZoneTag t : visits) {
    if (t != ZoneTag::Other) ab.push_back(t);
  }
  int count = 0;
  for (std::size_t i = 0; i + 2 < ab.size(); ++i) {
    if (ab[i] != ab[i + 1] && ab[i + 1] != ab[i + 2]) ++count;
  }
  return count;
}

IndicatorVector compute_indicators(const PersonTimeline& timeline,
                                   const ZonePartition& partition,
                                   const HeatmapGrid& position_risk_map,
                                   const SceneConfig& cfg,
                                   const WindowSpec& window,
                                   const IndicatorConfig& icfg) {
  validate_config(icfg);
  if (window.tau < 0) {
    throw Error(ErrorKind::Parameter, "window tau must be >= 0");
  }
  if (timeline.samples.empty()) return {};
  std::size_t i0 = 0;
  std::size_t i1 = timeline.samples.size();
  if (window.tau > 0) {
    std::int64_t t_end = timeline.samples.back().frame_index;
    std::tie(i0, i1) = frame_range(timeline, t_end - window.tau + 1, t_end);
  }
  return compute_range(timeline, i0, i1, partition, position_risk_map, cfg,
                       icfg);
}

SlidingResult sliding_indicators(const PersonTimeline& timeline,
                                 const ZonePartition& partition,
                                 const HeatmapGrid& position_risk_map,
                                 const SceneConfig& cfg,
                                 const WindowSpec& window,
                                 const IndicatorConfig& icfg) {
  validate_config(icfg);
  if (window.tau <= 0) {
    throw Error(ErrorKind::Parameter, "sliding windows need tau > 0");
  }
  if (window.stride < 1) {
    throw Error(ErrorKind::Parameter, "window stride must be >= 1");
  }
  SlidingResult result;
  if (timeline.samples.empty()) {
    result.truncated = true;
    return result;
  }
  const std::int64_t first = timeline.samples.front().frame_index;
  const std::int64_t last = timeline.samples.back().frame_index;
  if (last - first + 1 < window.tau) {
    // Timeline shorter than one window: emit a single short window.
    result.truncated = true;
    auto [i0, i1] = frame_range(timeline, first, last);
    result.windows.emplace_back(
        last, compute_range(timeline, i0, i1, partition, position_risk_map,
                            cfg, icfg));
    return result;
  }
  for (std::int64_t t = first + window.tau - 1; t <= last;
       t += window.stride) {
    auto [i0, i1] = frame_range(timeline, t - window.tau + 1, t);
    result.windows.emplace_back(
        t, compute_range(timeline, i0, i1, partition, position_risk_map, cfg,
                         icfg));
  }
  return result;
}

std::string indicator_csv_header() {
  return "video_id,person_id,window_end,pr,cr,ncr,ty,ly,bf,lt,e,label";
}

std::string indicator_row_to_csv(const IndicatorRow& row) {
  if (row.video_id.find(',') != std::string::npos ||
      row.video_id.find('\n') != std::string::npos) {
    throw Error(ErrorKind::Data,
                "video_id must not contain commas or newlines: " + row.video_id);
  }
  const IndicatorVector& v = row.indicators;
  std::ostringstream os;
  os << row.video_id << ',' << row.person_id << ',' << row.window_end << ','
     << format_double(v.pr) << ',' << (v.cr ? 1 : 0) << ',' << v.ncr << ','
     << format_double(v.ty) << ',' << format_double(v.ly) << ',' << v.bf << ','
     << (v.lt ? 1 : 0) << ',' << (v.e ? 1 : 0) << ',';
  if (row.label) os << *row.label;
  return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field_double(const std::string& s, int line_no,
                          const std::string& name) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                      ": bad " + name + " value '" + s + "'");
  }
}

std::int64_t parse_field_int(const std::string& s, int line_no,
                             const std::string& name) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                      ": bad " + name + " value '" + s + "'");
  }
}

bool parse_field_bool(const std::string& s, int line_no,
                      const std::string& name) {
  std::int64_t v = parse_field_int(s, line_no, name);
  if (v != 0 && v != 1) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " +
                                      name + " must be 0 or 1, got '" + s +
                                      "'");
  }
  return v == 1;
}

}  // namespace

std::vector<IndicatorRow> load_indicator_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Parse, path + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != indicator_csv_header()) {
    throw Error(ErrorKind::Schema, path + ": unexpected header '" + line + "'");
  }
  std::vector<IndicatorRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 12) {
      throw Error(ErrorKind::Schema, "line " + std::to_string(line_no) +
                                         ": expected 12 fields, got " +
                                         std::to_string(f.size()));
    }
    IndicatorRow row;
    row.video_id = f[0];
    row.person_id =
        static_cast<int>(parse_field_int(f[1], line_no, "person_id"));
    row.window_end = parse_field_int(f[2], line_no, "window_end");
    row.indicators.pr = parse_field_double(f[3], line_no, "pr");
    row.indicators.cr = parse_field_bool(f[4], line_no, "cr");
    row.indicators.ncr =
        static_cast<int>(parse_field_int(f[5], line_no, "ncr"));
    row.indicators.ty = parse_field_double(f[6], line_no, "ty");
    row.indicators.ly = parse_field_double(f[7], line_no, "ly");
    row.indicators.bf = static_cast<int>(parse_field_int(f[8], line_no, "bf"));
    row.indicators.lt = parse_field_bool(f[9], line_no, "lt");
    row.indicators.e = parse_field_bool(f[10], line_no, "e");
    if (!f[11].empty()) {
      row.label = parse_field_bool(f[11], line_no, "label") ? 1 : 0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_indicator_csv(const std::vector<IndicatorRow>& rows,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << indicator_csv_header() << '\n';
  for (const IndicatorRow& row : rows) {
    out << indicator_row_to_csv(row) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace sra
