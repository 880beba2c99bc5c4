#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sra {

enum class ErrorKind {
  Parse,
  Schema,
  Ordering,
  Config,
  Geometry,
  Parameter,
  Data,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Segment {
  Vec2 a;
  Vec2 b;
};

using Polygon = std::vector<Vec2>;   // closed implicitly, vertices in order
using Polyline = std::vector<Vec2>;  // open chain, >= 2 vertices

// Axis-aligned rectangle, origin at top-left corner in image coordinates.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid_vertices(const Polygon& poly);
bool polygon_is_simple(const Polygon& poly);

}  // namespace sra
