#include "sra/scene.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace sra {

namespace {

using nlohmann::json;

Vec2 point_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::Schema, what + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json point_to(const Vec2& p) { return json::array({p.x, p.y}); }

}  // namespace

void SceneConfig::validate() const {
  if (!polygon_is_simple(corner_quad()))
    throw Error(ErrorKind::Config,
                "scene: corners do not form a simple quadrilateral");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw Error(ErrorKind::Config, "scene: alpha must be in (0, 1/2)");
  if (!(beta > 0.0 && beta < 0.5))
    throw Error(ErrorKind::Config, "scene: beta must be in (0, 1/2)");
  if (!(offset_d > 0.0))
    throw Error(ErrorKind::Config, "scene: offset_d must be > 0");
  if (!(fps > 0.0)) throw Error(ErrorKind::Config, "scene: fps must be > 0");
  grid.validate();
  if (std::abs(homography.det()) <= 1e-12)
    throw Error(ErrorKind::Config, "scene: homography is not invertible");
  if (yellow_boundary_override && yellow_boundary_override->size() < 2)
    throw Error(ErrorKind::Config,
                "scene: yellow_boundary_override needs >= 2 points");
}

SceneConfig scene_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("scene: ") + e.what());
  }
  SceneConfig cfg;
  try {
    const json& corners = j.at("corners");
    cfg.t_l = point_from(corners.at("T_L"), "corners.T_L");
    cfg.t_r = point_from(corners.at("T_R"), "corners.T_R");
    cfg.b_l = point_from(corners.at("B_L"), "corners.B_L");
    cfg.b_r = point_from(corners.at("B_R"), "corners.B_R");
    const json& h = j.at("homography");
    if (!h.is_array() || h.size() != 3)
      throw Error(ErrorKind::Schema, "scene: homography must be 3x3");
    for (int r = 0; r < 3; ++r) {
      if (!h[r].is_array() || h[r].size() != 3)
        throw Error(ErrorKind::Schema, "scene: homography must be 3x3");
      for (int c = 0; c < 3; ++c)
        cfg.homography.m[r][c] = h[r][c].get<double>();
    }
    cfg.offset_d = j.value("offset_d", cfg.offset_d);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.fps = j.value("fps", cfg.fps);
    const json& g = j.at("grid");
    cfg.grid.min_x = g.at("min_x").get<double>();
    cfg.grid.min_y = g.at("min_y").get<double>();
    cfg.grid.max_x = g.at("max_x").get<double>();
    cfg.grid.max_y = g.at("max_y").get<double>();
    cfg.grid.cell = g.at("cell").get<double>();
    if (j.contains("yellow_boundary_override") &&
        !j["yellow_boundary_override"].is_null()) {
      Polyline pl;
      for (const json& p : j["yellow_boundary_override"])
        pl.push_back(point_from(p, "yellow_boundary_override point"));
      cfg.yellow_boundary_override = std::move(pl);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("scene: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scene_from_json_text(text);
}

std::string scene_to_json_text(const SceneConfig& cfg) {
  json j;
  j["corners"] = {{"T_L", point_to(cfg.t_l)},
                  {"T_R", point_to(cfg.t_r)},
                  {"B_L", point_to(cfg.b_l)},
                  {"B_R", point_to(cfg.b_r)}};
  json h = json::array();
  for (int r = 0; r < 3; ++r)
    h.push_back(json::array(
        {cfg.homography.m[r][0], cfg.homography.m[r][1], cfg.homography.m[r][2]}));
  j["homography"] = h;
  j["offset_d"] = cfg.offset_d;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["fps"] = cfg.fps;
  j["grid"] = {{"min_x", cfg.grid.min_x},
               {"min_y", cfg.grid.min_y},
               {"max_x", cfg.grid.max_x},
               {"max_y", cfg.grid.max_y},
               {"cell", cfg.grid.cell}};
  if (cfg.yellow_boundary_override) {
    json pl = json::array();
    for (const Vec2& p : *cfg.yellow_boundary_override) pl.push_back(point_to(p));
    j["yellow_boundary_override"] = pl;
  }
  return j.dump(2) + "\n";
}

void save_scene(const SceneConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << scene_to_json_text(cfg);
}

double offset_image_units(const SceneConfig& cfg, double meters) {
  if (!(meters > 0.0) || !std::isfinite(meters)) {
    throw Error(ErrorKind::Parameter, "offset depth must be positive");
  }
  Vec2 mid = (cfg.t_l + cfg.t_r) / 2.0;
  Vec2 edge = cfg.t_r - cfg.t_l;
  double len = edge.norm();
  if (!(len > 0.0)) {
    throw Error(ErrorKind::Geometry, "degenerate top edge");
  }
  Vec2 normal{-edge.y / len, edge.x / len};
  Vec2 centroid = polygon_centroid_vertices(cfg.corner_quad());
  if (normal.dot(centroid - mid) < 0.0) normal = normal * -1.0;

  Vec2 origin = apply(cfg.homography, mid);
  auto span = [&](double t) {
    return (apply(cfg.homography, mid + normal * t) - origin).norm();
  };
  // Bracket then bisect; the span grows monotonically over the platform.
  double hi = 1.0;
  for (int i = 0; i < 60 && span(hi) < meters; ++i) hi *= 2.0;
  if (span(hi) < meters) {
    throw Error(ErrorKind::Geometry, "offset depth beyond the mapped range");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double t = 0.5 * (lo + hi);
    if (t == lo || t == hi) break;
    (span(t) < meters ? lo : hi) = t;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sra
