#include "sra/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "sra/geometry.hpp"
#include "sra/projection.hpp"
#include "sra/rng.hpp"

namespace sra {

namespace {

// Truth-side predicates are written independently of the engine: winding
// number instead of even-odd, an explicit side test instead of the nearest
// segment machinery, and an incremental debouncer instead of run-length
// grouping. Scripts keep generous margins from every decision boundary so
// both implementations agree frame by frame on the noise-free stream.

Vec2 own_project(const Homography& h, const Vec2& p) {
  const auto& m = h.m;
  double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
          (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

bool on_edge(const Vec2& a, const Vec2& b, const Vec2& p) {
  if ((b - a).cross(p - a) != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

bool winding_inside(const Polygon& poly, const Vec2& p) {
  int wn = 0;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (on_edge(a, b, p)) return true;
    double c = (b - a).cross(p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && c > 0.0) ++wn;
    } else if (b.y <= p.y && c < 0.0) {
      --wn;
    }
  }
  return wn != 0;
}

int truth_zone(const ZonePartition& part, const Vec2& foot) {
  if (winding_inside(part.zone_a, foot)) return 0;
  if (winding_inside(part.zone_b, foot)) return 1;
  return 2;
}

// True when either leg is strictly on the far side of the boundary from the
// platform interior.
bool truth_on_yellow(const ZonePartition& part, const Vec2& left,
                     const Vec2& right) {
  const Vec2& a = part.yellow_boundary.front();
  const Vec2& b = part.yellow_boundary.back();
  double ref = (b - a).cross(part.quad_centroid - a);
  auto track_side = [&](const Vec2& p) {
    double s = (b - a).cross(p - a);
    return ref < 0.0 ? s > 0.0 : s < 0.0;
  };
  return track_side(left) || track_side(right);
}

struct TruthVisit {
  int state = 0;
  std::size_t enter = 0;
  std::size_t exit = 0;

  std::size_t span() const { return exit - enter + 1; }
};

// Streaming hysteresis filter: a state change commits only after h identical
// consecutive frames; shorter excursions vanish without extending the open
// visit.
std::vector<TruthVisit> debounce_states(const std::vector<int>& states,
                                        int initial, int h) {
  std::vector<TruthVisit> out;
  int committed = initial;
  bool open = false;
  TruthVisit cur;
  bool pending = false;
  int pend_val = 0;
  int pend_len = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    int v = states[i];
    if (v == committed) {
      pending = false;
      pend_len = 0;
      if (open) {
        cur.exit = i;
      } else {
        open = true;
        cur = {committed, i, i};
      }
      continue;
    }
    if (pending && v == pend_val) {
      ++pend_len;
    } else {
      pending = true;
      pend_val = v;
      pend_len = 1;
    }
    if (pend_len >= h) {
      if (open) out.push_back(cur);
      committed = v;
      open = true;
      cur = {v, i + 1 - static_cast<std::size_t>(h), i};
      pending = false;
      pend_len = 0;
    }
  }
  if (open) out.push_back(cur);
  return out;
}

IndicatorVector expected_from_truth(const PersonTruth& tr,
                                    const std::vector<std::uint8_t>& in_c,
                                    double fps) {
  IndicatorVector v;

  std::vector<int> yellow(tr.on_yellow.begin(), tr.on_yellow.end());
  for (const TruthVisit& vis : debounce_states(yellow, 0, 3)) {
    if (vis.state != 1) continue;
    ++v.ncr;
    double secs = static_cast<double>(vis.span()) / fps;
    v.ty += secs;
    v.ly = std::max(v.ly, secs);
    for (std::size_t i = vis.enter; i <= vis.exit; ++i) {
      Activity a = tr.activity[i];
      if (a == Activity::Walk || a == Activity::Stand) v.cr = true;
    }
  }

  std::vector<ZoneTag> tags;
  for (const TruthVisit& vis : debounce_states(tr.zone, 2, 3)) {
    if (vis.state == 0) tags.push_back(ZoneTag::A);
    if (vis.state == 1) tags.push_back(ZoneTag::B);
  }
  for (std::size_t i = 0; i + 2 < tags.size(); ++i) {
    if (tags[i] != tags[i + 1] && tags[i] == tags[i + 2]) ++v.bf;
  }

  int gaze_runs = 0;
  bool in_run = false;
  for (Activity a : tr.activity) {
    bool look = a == Activity::LookTunnel;
    if (look && !in_run) ++gaze_runs;
    in_run = look;
  }
  v.lt = gaze_runs >= 1;

  v.e = std::any_of(in_c.begin(), in_c.end(), [](std::uint8_t b) { return b != 0; });
  return v;
}

// Script-side view of the platform: zone anchor points and the across/along
// axes of the boundary, all in the metric frame.
struct PlatformFrame {
  Homography to_image;  // platform -> image
  Vec2 a_anchor, b_anchor, c_anchor;
  Vec2 neutral;  // mid-platform point between the two strips
  Vec2 spawn;    // near-end entry point
  Vec2 across;   // unit vector toward the track
  Vec2 along;    // unit vector along the boundary
  Vec2 dwell_base;  // just past the boundary at pacing latitude
};

Polygon project_polygon(const Homography& h, const Polygon& poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.push_back(apply(h, p));
  return out;
}

PlatformFrame make_platform_frame(const SceneConfig& scene,
                                  const ZonePartition& part) {
  PlatformFrame pf;
  const Homography& to_platform = scene.homography;
  pf.to_image = invert(to_platform);

  pf.a_anchor = polygon_centroid_vertices(project_polygon(to_platform, part.zone_a));
  pf.b_anchor = polygon_centroid_vertices(project_polygon(to_platform, part.zone_b));
  pf.c_anchor = polygon_centroid_vertices(project_polygon(to_platform, part.zone_c));
  pf.neutral = (pf.a_anchor + pf.b_anchor) / 2.0;

  Vec2 near_mid = (apply(to_platform, scene.b_l) + apply(to_platform, scene.b_r)) / 2.0;
  Vec2 inward = pf.neutral - near_mid;
  pf.spawn = near_mid + inward / inward.norm() * 1.5;

  Vec2 yt = apply(to_platform, part.yellow_boundary.front());
  Vec2 yb = apply(to_platform, part.yellow_boundary.back());
  Vec2 dir = yb - yt;
  pf.along = dir / dir.norm();
  pf.across = {-pf.along.y, pf.along.x};
  Vec2 centroid = apply(to_platform, part.quad_centroid);
  if (pf.across.dot(centroid - yt) > 0.0) pf.across = pf.across * -1.0;

  Vec2 on_line = yt + pf.along * (pf.b_anchor - yt).dot(pf.along);
  pf.dwell_base = on_line + pf.across * 0.15;
  return pf;
}

struct Phase {
  Vec2 target;
  double dwell_s = 0.0;
  Activity act = Activity::Stand;
};

struct Scripted {
  std::vector<Vec2> pos;
  std::vector<Activity> act;
};

Scripted run_script(const Vec2& spawn, const std::vector<Phase>& phases,
                    double speed, double fps, std::size_t n_frames) {
  Scripted s;
  s.pos.reserve(n_frames);
  s.act.reserve(n_frames);
  auto push = [&](const Vec2& p, Activity a) {
    if (s.pos.size() < n_frames) {
      s.pos.push_back(p);
      s.act.push_back(a);
    }
  };
  Vec2 cur = spawn;
  push(cur, Activity::Stand);
  double step = speed / fps;
  for (const Phase& ph : phases) {
    if (s.pos.size() >= n_frames) break;
    double dist = (ph.target - cur).norm();
    if (dist > 1e-12) {
      int steps = static_cast<int>(std::ceil(dist / step));
      for (int k = 1; k <= steps; ++k) {
        push(cur + (ph.target - cur) * (static_cast<double>(k) / steps),
             Activity::Walk);
      }
    }
    cur = ph.target;
    double capped = std::min(ph.dwell_s, 1e6);
    auto dn = static_cast<std::size_t>(std::llround(capped * fps));
    for (std::size_t k = 0; k < dn && s.pos.size() < n_frames; ++k) {
      push(cur, ph.act);
    }
  }
  while (s.pos.size() < n_frames) push(cur, Activity::Stand);
  return s;
}

std::vector<Phase> at_risk_phases(const PlatformFrame& pf,
                                  const BehaviorIntensity& in, Rng& rng) {
  std::vector<Phase> ph;
  auto jitter = [&](double r) {
    return Vec2{rng.uniform(-r, r), rng.uniform(-r, r)};
  };

  ph.push_back({pf.neutral + jitter(0.15), rng.uniform(0.8, 1.4)});
  if (rng.bernoulli(in.far_end_prob)) {
    ph.push_back({pf.c_anchor + jitter(0.12), rng.uniform(1.5, 3.0)});
  }

  int cycles = std::max(0, in.pacing_cycles + static_cast<int>(rng.below(3)) - 1);
  for (int c = 0; c < cycles; ++c) {
    ph.push_back({pf.a_anchor + jitter(0.15), rng.uniform(0.8, 1.6)});
    ph.push_back({pf.b_anchor + jitter(0.15), rng.uniform(0.8, 1.6)});
  }

  int gazes = std::max(0, in.look_tunnel_events + static_cast<int>(rng.below(3)) - 1);
  for (int g = 0; g < gazes; ++g) {
    Vec2 where = pf.neutral + jitter(0.2);
    ph.push_back({where, 0.4});
    ph.push_back({where, rng.uniform(0.8, 1.8), Activity::LookTunnel});
  }

  if (in.yellow_dwell_s > 0.0) {
    Vec2 dp = pf.dwell_base + pf.along * rng.uniform(-0.8, 0.8);
    ph.push_back({dp, std::max(1.0, in.yellow_dwell_s * rng.uniform(0.7, 1.3))});
  }

  ph.push_back({pf.neutral + jitter(0.25), 1e9});
  return ph;
}

std::vector<Phase> control_phases(const PlatformFrame& pf, Rng& rng) {
  std::vector<Phase> ph;
  Vec2 wait;
  if (rng.bernoulli(0.5)) {
    wait = pf.a_anchor;
  } else {
    wait = pf.b_anchor - pf.across * 0.2;
  }
  wait = wait + pf.along * rng.uniform(-0.4, 0.4) - pf.across * rng.uniform(0.0, 0.08);
  ph.push_back({wait, 1e9});
  return ph;
}

Rect bbox_from_legs(const Vec2& left, const Vec2& right) {
  double s = std::max(std::fabs(left.x - right.x), 1.0);
  double w = 6.0 * s;
  double h = 14.0 * s;
  double cx = (left.x + right.x) / 2.0;
  double bottom = std::max(left.y, right.y);
  return {cx - w / 2.0, bottom - h, w, h};
}

std::string format_id(const char* prefix, int i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%03d", prefix, i);
  return buf;
}

}  // namespace

void ScenarioSpec::validate() const {
  scene.validate();
  if (video_id.empty() || video_id.find(',') != std::string::npos ||
      video_id.find('\n') != std::string::npos) {
    throw Error(ErrorKind::Parameter, "scenario video_id must be nonempty without commas");
  }
  if (n_control < 0 || n_at_risk < 0 || n_control + n_at_risk == 0) {
    throw Error(ErrorKind::Parameter, "scenario needs at least one agent");
  }
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(ErrorKind::Parameter, "scenario duration must be positive");
  }
  if (!(noise.pos_jitter_px >= 0.0) || !std::isfinite(noise.pos_jitter_px)) {
    throw Error(ErrorKind::Parameter, "pos_jitter_px must be >= 0");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(noise.dropout_prob) || !prob(noise.label_flip_prob)) {
    throw Error(ErrorKind::Parameter, "noise probabilities must be in [0, 1]");
  }
  if (intensity.pacing_cycles < 0 || intensity.look_tunnel_events < 0 ||
      !(intensity.yellow_dwell_s >= 0.0) || !prob(intensity.far_end_prob)) {
    throw Error(ErrorKind::Parameter, "behavior intensity out of range");
  }
  if (scene.yellow_boundary_override) {
    throw Error(ErrorKind::Parameter,
                "scenario scripting assumes the default track boundary");
  }
}

SceneConfig default_scene() {
  SceneConfig cfg;
  cfg.t_l = {100.0, 80.0};
  cfg.t_r = {520.0, 90.0};
  cfg.b_l = {40.0, 400.0};
  cfg.b_r = {600.0, 380.0};
  std::vector<PointPair> pairs = {
      {cfg.t_l, {0.0, 0.0}},
      {cfg.t_r, {4.0, 0.0}},
      {cfg.b_l, {0.0, 25.0}},
      {cfg.b_r, {4.0, 25.0}},
  };
  cfg.homography = estimate(pairs).h;
  cfg.grid = {-0.5, -0.5, 4.5, 25.5, 0.1};
  cfg.fps = 10.0;
  cfg.offset_d = offset_image_units(cfg, 2.0);
  cfg.validate();
  return cfg;
}

ScenarioResult generate(const ScenarioSpec& spec) {
  spec.validate();
  ZonePartition part = build_zone_partition(spec.scene);
  PlatformFrame pf = make_platform_frame(spec.scene, part);

  ScenarioResult out;
  out.scene = spec.scene;
  out.video_id = spec.video_id;

  auto n_frames = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(spec.duration_s * spec.scene.fps)));
  int total = spec.n_at_risk + spec.n_control;

  for (int pid = 0; pid < total; ++pid) {
    int label = pid < spec.n_at_risk ? 1 : 0;
    Rng beh(spec.seed, static_cast<std::uint64_t>(2 * pid));
    Rng noi(spec.seed, static_cast<std::uint64_t>(2 * pid + 1));

    bool flipped = beh.bernoulli(spec.noise.label_flip_prob);
    int behavior = flipped ? 1 - label : label;

    double speed = behavior == 1 ? beh.uniform(1.2, 1.5) : beh.uniform(1.0, 1.4);
    Vec2 spawn = pf.spawn + Vec2{beh.uniform(-0.25, 0.25), beh.uniform(-0.25, 0.25)};
    std::vector<Phase> phases = behavior == 1
                                    ? at_risk_phases(pf, spec.intensity, beh)
                                    : control_phases(pf, beh);
    Scripted sc = run_script(spawn, phases, speed, spec.scene.fps, n_frames);

    PersonTruth tr;
    tr.person_id = pid;
    tr.label = label;
    tr.behavior_label = behavior;
    tr.frames.reserve(n_frames);

    PersonTimeline clean;
    clean.person_id = pid;
    clean.video_id = spec.video_id;
    clean.label = label;
    PersonTimeline noisy = clean;

    std::vector<std::uint8_t> in_c;
    in_c.reserve(n_frames);

    for (std::size_t f = 0; f < n_frames; ++f) {
      Vec2 p = sc.pos[f];
      Activity act = sc.act[f];
      Vec2 left = apply(pf.to_image, p - pf.across * 0.06);
      Vec2 right = apply(pf.to_image, p + pf.across * 0.06);
      Vec2 foot = (left + right) / 2.0;

      tr.frames.push_back(static_cast<std::int64_t>(f));
      tr.zone.push_back(truth_zone(part, foot));
      tr.on_yellow.push_back(truth_on_yellow(part, left, right) ? 1 : 0);
      tr.activity.push_back(act);
      tr.platform_trajectory.push_back(own_project(spec.scene.homography, foot));
      in_c.push_back(winding_inside(part.zone_c, foot) ? 1 : 0);

      FrameObservation obs;
      obs.frame_index = static_cast<std::int64_t>(f);
      obs.person_id = pid;
      obs.left_leg = left;
      obs.right_leg = right;
      obs.activity = act;
      obs.bbox = bbox_from_legs(left, right);
      clean.samples.push_back(obs);

      double sigma = spec.noise.pos_jitter_px;
      Vec2 left_n = left + Vec2{noi.gaussian(0.0, sigma), noi.gaussian(0.0, sigma)};
      Vec2 right_n = right + Vec2{noi.gaussian(0.0, sigma), noi.gaussian(0.0, sigma)};
      bool drop = noi.bernoulli(spec.noise.dropout_prob);
      if (!drop) {
        FrameObservation obs_n = obs;
        obs_n.left_leg = left_n;
        obs_n.right_leg = right_n;
        obs_n.bbox = bbox_from_legs(left_n, right_n);
        noisy.samples.push_back(obs_n);
      }
    }

    clean.foot_points.reserve(clean.samples.size());
    for (const FrameObservation& o : clean.samples) {
      clean.foot_points.push_back(derive_foot_point(o));
    }
    noisy.foot_points.reserve(noisy.samples.size());
    for (const FrameObservation& o : noisy.samples) {
      noisy.foot_points.push_back(derive_foot_point(o));
    }

    tr.expected = expected_from_truth(tr, in_c, spec.scene.fps);

    out.truth.push_back(std::move(tr));
    out.clean_stream.push_back(std::move(clean));
    if (!noisy.samples.empty()) out.stream.push_back(std::move(noisy));
    out.labels[{spec.video_id, pid}] = label;
  }
  return out;
}

std::vector<ScenarioSpec> benchmark_corpus(const std::string& profile,
                                           std::uint64_t seed) {
  SceneConfig scene = default_scene();
  Rng seeder(seed, 77);
  std::vector<ScenarioSpec> specs;

  if (profile == "smoke") {
    for (int i = 0; i < 8; ++i) {
      ScenarioSpec s;
      s.scene = scene;
      s.video_id = format_id("smoke", i);
      s.n_control = 1;
      s.n_at_risk = 1;
      s.duration_s = 60.0;
      s.noise = {1.0, 0.02, 0.0};
      s.intensity = {2, 3.0, 1, 0.5};
      s.seed = seeder.next_u64();
      specs.push_back(std::move(s));
    }
    return specs;
  }

  if (profile == "paper-shaped") {
    // 122 station recordings, 66 at-risk individuals, 190 controls.
    for (int i = 0; i < 122; ++i) {
      ScenarioSpec s;
      s.scene = scene;
      s.video_id = format_id("paper", i);
      s.n_at_risk = i < 66 ? 1 : 0;
      s.n_control = 1 + (i < 68 ? 1 : 0);
      s.duration_s = 300.0;
      s.noise = {2.0, 0.05, 0.03};
      s.seed = seeder.next_u64();
      specs.push_back(std::move(s));
    }
    return specs;
  }

  throw Error(ErrorKind::Parameter, "unknown corpus profile: " + profile);
}

std::string truth_to_json_text(const ScenarioResult& result) {
  nlohmann::json j;
  j["format"] = "truth-log";
  j["version"] = 1;
  j["video_id"] = result.video_id;
  nlohmann::json persons = nlohmann::json::array();
  for (const PersonTruth& tr : result.truth) {
    nlohmann::json p;
    p["person_id"] = tr.person_id;
    p["label"] = tr.label;
    p["behavior_label"] = tr.behavior_label;
    p["frames"] = tr.frames;
    p["zone"] = tr.zone;
    p["on_yellow"] = tr.on_yellow;
    nlohmann::json acts = nlohmann::json::array();
    for (Activity a : tr.activity) acts.push_back(to_string(a));
    p["activity"] = std::move(acts);
    nlohmann::json traj = nlohmann::json::array();
    for (const Vec2& v : tr.platform_trajectory) {
      traj.push_back(nlohmann::json::array({v.x, v.y}));
    }
    p["platform"] = std::move(traj);
    const IndicatorVector& e = tr.expected;
    p["expected"] = {{"pr", e.pr}, {"cr", e.cr}, {"ncr", e.ncr}, {"ty", e.ty},
                     {"ly", e.ly}, {"bf", e.bf}, {"lt", e.lt},   {"e", e.e}};
    persons.push_back(std::move(p));
  }
  j["persons"] = std::move(persons);
  return j.dump();
}

}  // namespace sra
