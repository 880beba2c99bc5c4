#include "sra/types.hpp"

#include <cstddef>

namespace sra {

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    twice += p.cross(q);
  }
  return std::abs(twice) * 0.5;
}

Vec2 polygon_centroid_vertices(const Polygon& poly) {
  Vec2 c;
  for (const Vec2& p : poly) c = c + p;
  return poly.empty() ? c : c / static_cast<double>(poly.size());
}

namespace {

bool on_segment_collinear(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
         std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

int orientation(const Vec2& p, const Vec2& q, const Vec2& r) {
  double v = (q - p).cross(r - p);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                        const Vec2& q2) {
  int o1 = orientation(p1, p2, q1);
  int o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1);
  int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(p1, q1, p2)) return true;
  if (o2 == 0 && on_segment_collinear(p1, q2, p2)) return true;
  if (o3 == 0 && on_segment_collinear(q1, p1, q2)) return true;
  if (o4 == 0 && on_segment_collinear(q1, p2, q2)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a1 = poly[i];
    Vec2 a2 = poly[(i + 1) % n];
    if ((a2 - a1).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share an endpoint, skip them
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      Vec2 b1 = poly[j];
      Vec2 b2 = poly[(j + 1) % n];
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

}  // namespace sra
