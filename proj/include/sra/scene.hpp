#pragma once

#include <optional>
#include <string>

#include "sra/heatmap.hpp"
#include "sra/projection.hpp"
#include "sra/types.hpp"

namespace sra {

// Camera-to-platform calibration for one station view.
// Corners are image pixels; the homography maps pixels to the
// platform-referenced metric frame; offset_d, alpha, beta parameterize the
// zone construction.
struct SceneConfig {
  Vec2 t_l, t_r, b_l, b_r;      // platform corner points
  Homography homography;        // image -> platform (meters)
  double offset_d = 2.0;        // far-end band depth, image units
  double alpha = 1.0 / 5.0;     // top-edge fraction
  double beta = 1.0 / 7.0;      // bottom-edge fraction
  double fps = 10.0;
  GridSpec grid;
  std::optional<Polyline> yellow_boundary_override;  // image coordinates

  void validate() const;
  Polygon corner_quad() const { return {t_l, t_r, b_r, b_l}; }
};

SceneConfig scene_from_json_text(const std::string& text);
SceneConfig load_scene(const std::string& path);
std::string scene_to_json_text(const SceneConfig& cfg);
void save_scene(const SceneConfig& cfg, const std::string& path);

// Image-space distance along the top edge's inward normal that spans `meters`
// in the platform frame, measured at the edge midpoint. Used to calibrate
// offset_d from a physical depth.
double offset_image_units(const SceneConfig& cfg, double meters);

}  // namespace sra
