#include "sra/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sra {

namespace {

int ceil_cells(double span, double cell) {
  // guard against 50.000000000000007-style quotients
  int n = static_cast<int>(std::ceil(span / cell - 1e-9));
  return std::max(n, 1);
}

}  // namespace

int GridSpec::nx() const { return ceil_cells(max_x - min_x, cell); }
int GridSpec::ny() const { return ceil_cells(max_y - min_y, cell); }

void GridSpec::validate() const {
  if (!(cell > 0.0))
    throw Error(ErrorKind::Config, "grid: cell size must be > 0");
  if (!(max_x > min_x) || !(max_y > min_y))
    throw Error(ErrorKind::Config, "grid: empty extent");
  if (!std::isfinite(min_x) || !std::isfinite(min_y) ||
      !std::isfinite(max_x) || !std::isfinite(max_y) || !std::isfinite(cell))
    throw Error(ErrorKind::Config, "grid: non-finite extent");
}

double HeatmapGrid::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double HeatmapGrid::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

HeatmapGrid make_grid(const GridSpec& spec) {
  spec.validate();
  HeatmapGrid g;
  g.spec = spec;
  g.values.assign(static_cast<std::size_t>(spec.nx()) * spec.ny(), 0.0);
  return g;
}

bool cell_index(const GridSpec& spec, const Vec2& p, int& ix, int& iy) {
  if (!p.finite()) return false;
  ix = static_cast<int>(std::floor((p.x - spec.min_x) / spec.cell));
  iy = static_cast<int>(std::floor((p.y - spec.min_y) / spec.cell));
  return ix >= 0 && ix < spec.nx() && iy >= 0 && iy < spec.ny();
}

AccumulateResult accumulate(const std::vector<Vec2>& points,
                            const GridSpec& spec) {
  AccumulateResult res;
  res.grid = make_grid(spec);
  for (const Vec2& p : points) {
    int ix, iy;
    if (cell_index(spec, p, ix, iy))
      res.grid.at(ix, iy) += 1.0;
    else
      ++res.out_of_extent;
  }
  return res;
}

HeatmapGrid smooth(const HeatmapGrid& grid, double sigma) {
  if (!(sigma > 0.0))
    throw Error(ErrorKind::Parameter, "smooth: sigma must be > 0");
  const double sc = sigma / grid.spec.cell;  // sigma in cells
  const int radius = static_cast<int>(std::ceil(3.0 * sc));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (int k = -radius; k <= radius; ++k)
    kernel[static_cast<std::size_t>(k + radius)] =
        std::exp(-0.5 * (k / sc) * (k / sc));

  const int nx = grid.spec.nx();
  const int ny = grid.spec.ny();

  // Two separable scatter passes. Each source cell redistributes its mass
  // over the in-grid part of its window with the weights renormalized, so
  // the pass conserves mass including at borders.
  auto pass = [&](const std::vector<double>& in, std::vector<double>& out,
                  int len, int stride, int line_count, int line_stride) {
    for (int line = 0; line < line_count; ++line) {
      const std::size_t base = static_cast<std::size_t>(line) * line_stride;
      for (int i = 0; i < len; ++i) {
        double v = in[base + static_cast<std::size_t>(i) * stride];
        if (v == 0.0) continue;
        int lo = std::max(0, i - radius);
        int hi = std::min(len - 1, i + radius);
        double wsum = 0.0;
        for (int j = lo; j <= hi; ++j)
          wsum += kernel[static_cast<std::size_t>(j - i + radius)];
        for (int j = lo; j <= hi; ++j)
          out[base + static_cast<std::size_t>(j) * stride] +=
              v * kernel[static_cast<std::size_t>(j - i + radius)] / wsum;
      }
    }
  };

  std::vector<double> tmp(grid.values.size(), 0.0);
  pass(grid.values, tmp, nx, 1, ny, nx);  // along x, one row per line
  HeatmapGrid out = make_grid(grid.spec);
  out.sources = grid.sources;
  // along y: stride nx, line per column
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      double v = tmp[static_cast<std::size_t>(iy) * nx + ix];
      if (v == 0.0) continue;
      int lo = std::max(0, iy - radius);
      int hi = std::min(ny - 1, iy + radius);
      double wsum = 0.0;
      for (int j = lo; j <= hi; ++j)
        wsum += kernel[static_cast<std::size_t>(j - iy + radius)];
      for (int j = lo; j <= hi; ++j)
        out.at(ix, j) += v * kernel[static_cast<std::size_t>(j - iy + radius)] / wsum;
    }
  }
  return out;
}

HeatmapGrid aggregate(const std::vector<const HeatmapGrid*>& maps) {
  if (maps.empty())
    throw Error(ErrorKind::Parameter, "aggregate: no maps given");
  const GridSpec& spec = maps.front()->spec;
  for (const HeatmapGrid* m : maps)
    if (!(m->spec == spec) || m->values.size() != maps.front()->values.size())
      throw Error(ErrorKind::Parameter, "aggregate: mismatched grid shapes");

  HeatmapGrid out = make_grid(spec);
  const double k = static_cast<double>(maps.size());
  std::vector<double> column(maps.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    for (std::size_t m = 0; m < maps.size(); ++m)
      column[m] = maps[m]->values[i];
    // summing in sorted order makes the mean independent of input order
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (double v : column) s += v;
    out.values[i] = s / k;
  }
  for (const HeatmapGrid* m : maps)
    out.sources.insert(out.sources.end(), m->sources.begin(),
                       m->sources.end());
  return out;
}

HeatmapGrid aggregate(const std::vector<HeatmapGrid>& maps) {
  std::vector<const HeatmapGrid*> ptrs;
  ptrs.reserve(maps.size());
  for (const HeatmapGrid& m : maps) ptrs.push_back(&m);
  return aggregate(ptrs);
}

HeatmapGrid normalize(const HeatmapGrid& grid) {
  double mx = grid.max_value();
  HeatmapGrid out = grid;
  if (mx <= 0.0) return out;
  for (double& v : out.values) v /= mx;
  return out;
}

double sample_bilinear(const HeatmapGrid& grid, const Vec2& p) {
  const GridSpec& s = grid.spec;
  const int nx = s.nx();
  const int ny = s.ny();
  double u = (p.x - s.min_x) / s.cell - 0.5;
  double v = (p.y - s.min_y) / s.cell - 0.5;
  int i0 = static_cast<int>(std::floor(u));
  int j0 = static_cast<int>(std::floor(v));
  double tu = u - i0;
  double tv = v - j0;
  // clamp to edge
  if (i0 < 0) { i0 = 0; tu = 0.0; }
  if (i0 > nx - 2) { i0 = std::max(nx - 2, 0); tu = nx > 1 ? 1.0 : 0.0; }
  if (j0 < 0) { j0 = 0; tv = 0.0; }
  if (j0 > ny - 2) { j0 = std::max(ny - 2, 0); tv = ny > 1 ? 1.0 : 0.0; }
  int i1 = std::min(i0 + 1, nx - 1);
  int j1 = std::min(j0 + 1, ny - 1);
  double a = grid.at(i0, j0) * (1.0 - tu) + grid.at(i1, j0) * tu;
  double b = grid.at(i0, j1) * (1.0 - tu) + grid.at(i1, j1) * tu;
  return a * (1.0 - tv) + b * tv;
}

double position_risk(const HeatmapGrid& normalized,
                     const std::vector<Vec2>& trajectory) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Vec2& p : trajectory) {
    int ix, iy;
    if (!cell_index(normalized.spec, p, ix, iy)) continue;
    sum += sample_bilinear(normalized, p);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void write_pgm16(const HeatmapGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const int nx = grid.spec.nx();
  const int ny = grid.spec.ny();
  out << "P5\n" << nx << " " << ny << "\n65535\n";
  const double mx = grid.max_value();
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double v = mx > 0.0 ? grid.at(ix, iy) / mx : 0.0;
      auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
      out.write(bytes, 2);
    }
  }
}

void write_grid_csv(const HeatmapGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const int nx = grid.spec.nx();
  const int ny = grid.spec.ny();
  char buf[40];
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.at(ix, iy));
      out << buf << (ix + 1 == nx ? '\n' : ',');
    }
  }
}

HeatmapGrid read_grid_csv(const std::string& path, const GridSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  HeatmapGrid g = make_grid(spec);
  std::string line;
  int iy = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (iy >= spec.ny())
      throw Error(ErrorKind::Parse, path + ": more rows than grid spec");
    std::stringstream ss(line);
    std::string tok;
    int ix = 0;
    while (std::getline(ss, tok, ',')) {
      if (ix >= spec.nx())
        throw Error(ErrorKind::Parse, path + ": more columns than grid spec");
      try {
        g.at(ix, iy) = std::stod(tok);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, path + ": bad value '" + tok + "'");
      }
      ++ix;
    }
    if (ix != spec.nx())
      throw Error(ErrorKind::Parse, path + ": short row " + std::to_string(iy));
    ++iy;
  }
  if (iy != spec.ny())
    throw Error(ErrorKind::Parse, path + ": expected " +
                                      std::to_string(spec.ny()) + " rows");
  return g;
}

}  // namespace sra
