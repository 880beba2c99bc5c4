#include "sra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace sra {

namespace {

constexpr double kParallelEps = 1e-12;

// p + t*u meets q + s*v; returns t
double line_intersection_param(const Vec2& p, const Vec2& u, const Vec2& q,
                               const Vec2& v) {
  double denom = u.cross(v);
  if (std::abs(denom) <= kParallelEps * u.norm() * v.norm())
    throw Error(ErrorKind::Geometry,
                "zone construction: parallel boundary lines, no intersection");
  return (q - p).cross(v) / denom;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.dot(ab);
  if (len2 == 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b,
                      double tol = 1e-9) {
  Vec2 ab = b - a;
  double len = ab.norm();
  if (len == 0.0) return (p - a).norm() <= tol;
  double dist = std::abs(ab.cross(p - a)) / len;
  if (dist > tol) return false;
  double t = (p - a).dot(ab) / (len * len);
  return t >= -tol / len && t <= 1.0 + tol / len;
}

int strict_orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  double v = (b - a).cross(c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool proper_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                         const Vec2& q1) {
  int o1 = strict_orientation(p0, p1, q0);
  int o2 = strict_orientation(p0, p1, q1);
  int o3 = strict_orientation(q0, q1, p0);
  int o4 = strict_orientation(q0, q1, p1);
  return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

double polyline_side(const Polyline& boundary, const Vec2& p,
                     const Vec2& platform_reference) {
  double best_dist = std::numeric_limits<double>::infinity();
  double side = 0.0;
  for (std::size_t i = 0; i + 1 < boundary.size(); ++i) {
    const Vec2& a = boundary[i];
    const Vec2& b = boundary[i + 1];
    double d = point_segment_distance(p, a, b);
    if (d < best_dist) {
      best_dist = d;
      double s = (b - a).cross(p - a);
      double ref = (b - a).cross(platform_reference - a);
      // orient so the platform side is negative
      side = ref > 0 ? -s : s;
    }
  }
  return side;
}

}  // namespace

ZonePartition build_zone_partition(const SceneConfig& cfg) {
  cfg.validate();
  const Vec2 tl = cfg.t_l, tr = cfg.t_r, bl = cfg.b_l, br = cfg.b_r;
  const Vec2 centroid = (tl + tr + bl + br) / 4.0;

  Vec2 edge = tr - tl;
  if (edge.norm() == 0.0)
    throw Error(ErrorKind::Geometry, "zone construction: degenerate top edge");
  Vec2 normal{-edge.y, edge.x};
  normal = normal / normal.norm();
  Vec2 mid = (tl + tr) / 2.0;
  if ((centroid - mid).dot(normal) < 0.0) normal = normal * -1.0;

  ZonePartition zp;
  zp.quad_centroid = centroid;
  zp.l_o = {tl, tr};
  zp.l_d = {tl + normal * cfg.offset_d, tr + normal * cfg.offset_d};

  Vec2 dir_d = zp.l_d.b - zp.l_d.a;
  double t_left =
      line_intersection_param(tl, bl - tl, zp.l_d.a, dir_d);
  double t_right =
      line_intersection_param(tr, br - tr, zp.l_d.a, dir_d);
  if (t_left > 1.0 + 1e-9 || t_right > 1.0 + 1e-9)
    throw Error(ErrorKind::Geometry,
                "zone construction: offset_d exceeds the platform depth");
  Vec2 q_l = tl + (bl - tl) * t_left;
  Vec2 q_r = tr + (br - tr) * t_right;
  zp.s_d = {q_l, q_r};

  Vec2 tl_a = tl + (tr - tl) * cfg.alpha;
  Vec2 tr_a = tr + (tl - tr) * cfg.alpha;
  Vec2 bl_b = bl + (br - bl) * cfg.beta;
  Vec2 br_b = br + (bl - br) * cfg.beta;
  zp.l_left = {tl_a, bl_b};
  zp.l_right = {tr_a, br_b};

  zp.zone_a = {tl, tl_a, bl_b, bl};
  zp.zone_b = {tr_a, tr, br, br_b};
  zp.zone_c = {tl, tr, q_r, q_l};

  zp.yellow_boundary =
      cfg.yellow_boundary_override ? *cfg.yellow_boundary_override
                                   : Polyline{tr, br};
  return zp;
}

bool point_in_polygon_even_odd(const Polygon& poly, const Vec2& p) {
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (point_on_segment(p, poly[i], poly[(i + 1) % poly.size()])) return true;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

double yellow_side(const ZonePartition& partition, const Vec2& point) {
  return polyline_side(partition.yellow_boundary, point,
                       partition.quad_centroid);
}

ZoneMembership locate(const ZonePartition& partition, const Vec2& point) {
  ZoneMembership m;
  m.in_a = point_in_polygon_even_odd(partition.zone_a, point);
  m.in_b = point_in_polygon_even_odd(partition.zone_b, point);
  m.in_c = point_in_polygon_even_odd(partition.zone_c, point);
  m.on_yellow = yellow_side(partition, point) > 0.0;
  return m;
}

bool segment_crosses(const Polyline& boundary, const Vec2& p0, const Vec2& p1,
                     const Vec2& platform_reference) {
  if (!p0.finite() || !p1.finite())
    throw Error(ErrorKind::Parameter, "segment_crosses: non-finite endpoint");
  for (std::size_t i = 0; i + 1 < boundary.size(); ++i)
    if (proper_intersection(p0, p1, boundary[i], boundary[i + 1])) return true;
  double s0 = polyline_side(boundary, p0, platform_reference);
  double s1 = polyline_side(boundary, p1, platform_reference);
  return (s0 > 0.0 && s1 < 0.0) || (s0 < 0.0 && s1 > 0.0);
}

bool segment_crosses(const ZonePartition& partition, const Vec2& p0,
                     const Vec2& p1) {
  return segment_crosses(partition.yellow_boundary, p0, p1,
                         partition.quad_centroid);
}

std::string partition_to_json_text(const ZonePartition& partition) {
  using nlohmann::json;
  auto poly = [](const Polygon& p) {
    json a = json::array();
    for (const Vec2& v : p) a.push_back(json::array({v.x, v.y}));
    return a;
  };
  auto seg = [](const Segment& s) {
    return json::array(
        {json::array({s.a.x, s.a.y}), json::array({s.b.x, s.b.y})});
  };
  json j;
  j["zone_a"] = poly(partition.zone_a);
  j["zone_b"] = poly(partition.zone_b);
  j["zone_c"] = poly(partition.zone_c);
  j["l_left"] = seg(partition.l_left);
  j["l_right"] = seg(partition.l_right);
  j["l_o"] = seg(partition.l_o);
  j["l_d"] = seg(partition.l_d);
  j["s_d"] = seg(partition.s_d);
  j["yellow_boundary"] = poly(partition.yellow_boundary);
  return j.dump(2) + "\n";
}

void write_zone_overlay_pgm(const ZonePartition& partition,
                            const std::string& path, int max_dim) {
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const Polygon* poly :
       {&partition.zone_a, &partition.zone_b, &partition.zone_c}) {
    for (const Vec2& v : *poly) {
      min_x = std::min(min_x, v.x);
      min_y = std::min(min_y, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
  }
  double span_x = max_x - min_x, span_y = max_y - min_y;
  double pad = 0.05 * std::max(span_x, span_y);
  min_x -= pad; min_y -= pad; span_x += 2 * pad; span_y += 2 * pad;
  double scale = max_dim / std::max(span_x, span_y);
  int w = std::max(1, static_cast<int>(std::lround(span_x * scale)));
  int h = std::max(1, static_cast<int>(std::lround(span_y * scale)));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "P5\n" << w << " " << h << "\n255\n";
  std::string row(static_cast<std::size_t>(w), '\0');
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      Vec2 p{min_x + (px + 0.5) / scale, min_y + (py + 0.5) / scale};
      ZoneMembership m = locate(partition, p);
      unsigned char code = 0;
      if (m.in_b) code = 255;
      else if (m.in_a) code = 170;
      else if (m.in_c) code = 85;
      row[static_cast<std::size_t>(px)] = static_cast<char>(code);
    }
    out.write(row.data(), w);
  }
}

}  // namespace sra
