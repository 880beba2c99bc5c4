#pragma once

#include <array>
#include <vector>

#include "sra/types.hpp"

namespace sra {

// 3x3 projective map, scale-normalized so m[2][2] = 1 whenever that entry
// is not vanishing.
struct Homography {
  std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  static Homography identity() { return {}; }
  static Homography translation(double tx, double ty);

  double det() const;
  void normalize_scale();
};

struct PointPair {
  Vec2 src;
  Vec2 dst;
};

struct EstimateResult {
  Homography h;
  double reprojection_rms = 0.0;
};

Vec2 apply(const Homography& h, const Vec2& p);

// Normalized DLT over >= 4 correspondences.
EstimateResult estimate(const std::vector<PointPair>& pairs);

Homography invert(const Homography& h);

}  // namespace sra
