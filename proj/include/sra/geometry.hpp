#pragma once

#include <string>

#include "sra/scene.hpp"
#include "sra/types.hpp"

namespace sra {

// The three platform zones plus the named construction segments, all in
// image coordinates.
struct ZonePartition {
  Polygon zone_a;  // wall-proximal strip
  Polygon zone_b;  // yellow-line-proximal strip
  Polygon zone_c;  // far-end offset band
  Segment l_left;
  Segment l_right;
  Segment l_o;  // top edge T_L -> T_R
  Segment l_d;  // offset line through the band's far side
  Segment s_d;  // Q_L -> Q_R
  Polyline yellow_boundary;
  Vec2 quad_centroid;  // platform side reference for yellow side tests
};

struct ZoneMembership {
  bool in_a = false;
  bool in_b = false;
  bool in_c = false;
  bool on_yellow = false;
};

ZonePartition build_zone_partition(const SceneConfig& cfg);

// Even-odd membership per zone; points on an edge count as inside.
// on_yellow is strict: the point must be properly on the track side.
ZoneMembership locate(const ZonePartition& partition, const Vec2& point);

// Signed side of the boundary polyline: > 0 on the track side, < 0 on the
// platform side, 0 on the boundary.
double yellow_side(const ZonePartition& partition, const Vec2& point);

bool segment_crosses(const Polyline& boundary, const Vec2& p0, const Vec2& p1,
                     const Vec2& platform_reference);
bool segment_crosses(const ZonePartition& partition, const Vec2& p0,
                     const Vec2& p1);

bool point_in_polygon_even_odd(const Polygon& poly, const Vec2& p);

std::string partition_to_json_text(const ZonePartition& partition);
void write_zone_overlay_pgm(const ZonePartition& partition,
                            const std::string& path, int max_dim = 512);

}  // namespace sra
