#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sra/heatmap.hpp"
#include "sra/scene.hpp"
#include "sra/types.hpp"

namespace testutil {

// Unit-square platform with an identity camera map. d, alpha, beta default to
// the closed-form reference values used across the geometry tests.
inline sra::SceneConfig unit_scene(double offset_d = 0.1,
                                   double alpha = 1.0 / 5.0,
                                   double beta = 1.0 / 7.0) {
  sra::SceneConfig cfg;
  cfg.t_l = {0.0, 0.0};
  cfg.t_r = {1.0, 0.0};
  cfg.b_l = {0.0, 1.0};
  cfg.b_r = {1.0, 1.0};
  cfg.homography = sra::Homography::identity();
  cfg.offset_d = offset_d;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.fps = 10.0;
  cfg.grid = {0.0, 0.0, 1.0, 1.0, 0.1};
  return cfg;
}

// Convex quad built as a jittered rectangle, guaranteed valid for the zone
// construction with the returned offset_d.
struct RandomQuad {
  sra::Vec2 t_l, t_r, b_l, b_r;
  double offset_d = 0.0;
};

inline RandomQuad random_quad(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> wdist(2.0, 12.0);
  std::uniform_real_distribution<double> hdist(2.0, 12.0);
  double w = wdist(gen);
  double h = hdist(gen);
  std::uniform_real_distribution<double> jit(-0.15, 0.15);
  RandomQuad q;
  q.t_l = {0.0 + jit(gen) * w, 0.0 + jit(gen) * h};
  q.t_r = {w + jit(gen) * w, 0.0 + jit(gen) * h};
  q.b_l = {0.0 + jit(gen) * w, h + jit(gen) * h};
  q.b_r = {w + jit(gen) * w, h + jit(gen) * h};
  std::uniform_real_distribution<double> od(0.05, 0.3);
  q.offset_d = od(gen) * h;
  return q;
}

inline sra::SceneConfig scene_from_quad(const RandomQuad& q) {
  sra::SceneConfig cfg = unit_scene();
  cfg.t_l = q.t_l;
  cfg.t_r = q.t_r;
  cfg.b_l = q.b_l;
  cfg.b_r = q.b_r;
  cfg.offset_d = q.offset_d;
  return cfg;
}

inline sra::HeatmapGrid zero_map(const sra::GridSpec& spec) {
  return sra::make_grid(spec);
}

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

inline bool close(const sra::Vec2& a, const sra::Vec2& b, double tol) {
  return close(a.x, b.x, tol) && close(a.y, b.y, tol);
}

}  // namespace testutil
