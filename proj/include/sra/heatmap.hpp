#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sra/types.hpp"

namespace sra {

// Platform-referenced raster extent, in meters.
struct GridSpec {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;
  double cell = 0.1;

  int nx() const;
  int ny() const;
  void validate() const;
  bool operator==(const GridSpec& o) const = default;
};

struct HeatmapGrid {
  GridSpec spec;
  std::vector<double> values;        // row-major, ny rows of nx, all >= 0
  std::vector<std::string> sources;  // provenance tags ("video:person")

  double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * spec.nx() + ix]; }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * spec.nx() + ix]; }
  double mass() const;
  double max_value() const;
};

HeatmapGrid make_grid(const GridSpec& spec);

struct AccumulateResult {
  HeatmapGrid grid;
  std::size_t out_of_extent = 0;
};

// One unit of heat per in-extent point, dropped into the containing cell.
AccumulateResult accumulate(const std::vector<Vec2>& points,
                            const GridSpec& spec);

// Truncated +-3 sigma Gaussian, weights renormalized at grid borders so
// total mass is conserved. sigma in meters.
HeatmapGrid smooth(const HeatmapGrid& grid, double sigma);

// Cellwise arithmetic mean of K grids sharing one spec.
HeatmapGrid aggregate(const std::vector<HeatmapGrid>& maps);
HeatmapGrid aggregate(const std::vector<const HeatmapGrid*>& maps);

// Scale so the max cell is 1; the identically-zero grid passes through.
HeatmapGrid normalize(const HeatmapGrid& grid);

// Mean of bilinearly interpolated values at in-extent trajectory points.
double position_risk(const HeatmapGrid& normalized,
                     const std::vector<Vec2>& trajectory);

bool cell_index(const GridSpec& spec, const Vec2& p, int& ix, int& iy);
double sample_bilinear(const HeatmapGrid& grid, const Vec2& p);

void write_pgm16(const HeatmapGrid& grid, const std::string& path);
void write_grid_csv(const HeatmapGrid& grid, const std::string& path);
HeatmapGrid read_grid_csv(const std::string& path, const GridSpec& spec);

}  // namespace sra
