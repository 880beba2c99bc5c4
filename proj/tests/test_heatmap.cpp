#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "sra/heatmap.hpp"

using sra::accumulate;
using sra::aggregate;
using sra::GridSpec;
using sra::HeatmapGrid;
using sra::make_grid;
using sra::normalize;
using sra::position_risk;
using sra::smooth;
using sra::Vec2;

namespace {

GridSpec spec_10x8() { return {0.0, 0.0, 1.0, 0.8, 0.1}; }

HeatmapGrid random_grid(std::mt19937_64& gen, const GridSpec& spec,
                        double density = 0.7) {
  HeatmapGrid g = make_grid(spec);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::bernoulli_distribution keep(density);
  for (double& v : g.values)
    if (keep(gen)) v = val(gen);
  return g;
}

}  // namespace

TEST_CASE("grid dimensions come from the ceiling rule") {
  GridSpec s = spec_10x8();
  CHECK(s.nx() == 10);
  CHECK(s.ny() == 8);
  GridSpec odd{0.0, 0.0, 1.05, 0.5, 0.1};
  CHECK(odd.nx() == 11);
  CHECK(odd.ny() == 5);
}

TEST_CASE("accumulate matches a brute-force histogram") {
  std::mt19937_64 gen(41);
  GridSpec spec = spec_10x8();
  std::uniform_real_distribution<double> px(-0.3, 1.3);
  std::uniform_real_distribution<double> py(-0.3, 1.1);
  std::vector<Vec2> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({px(gen), py(gen)});

  sra::AccumulateResult res = accumulate(pts, spec);

  std::vector<double> expect(static_cast<std::size_t>(spec.nx()) * spec.ny(),
                             0.0);
  std::size_t outside = 0;
  for (const Vec2& p : pts) {
    int ix = static_cast<int>(std::floor((p.x - spec.min_x) / spec.cell));
    int iy = static_cast<int>(std::floor((p.y - spec.min_y) / spec.cell));
    if (ix >= 0 && ix < spec.nx() && iy >= 0 && iy < spec.ny())
      expect[static_cast<std::size_t>(iy) * spec.nx() + ix] += 1.0;
    else
      ++outside;
  }
  CHECK(res.out_of_extent == outside);
  REQUIRE(res.grid.values.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(res.grid.values[i] == expect[i]);
  CHECK(res.grid.mass() == doctest::Approx(200.0 - outside));
}

TEST_CASE("repeated point stacks heat in one cell") {
  std::vector<Vec2> pts(5, Vec2{0.55, 0.35});
  sra::AccumulateResult res = accumulate(pts, spec_10x8());
  CHECK(res.grid.at(5, 3) == 5.0);
  CHECK(res.grid.mass() == 5.0);
}

TEST_CASE("smoothing conserves mass on random grids and border impulses") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> sig(0.05, 0.6);
  for (int k = 0; k < 100; ++k) {
    HeatmapGrid g = random_grid(gen, spec_10x8());
    // force an impulse onto a border or corner every time
    int edge = k % 4;
    int ix = edge == 0 ? 0 : (edge == 1 ? g.spec.nx() - 1 : k % g.spec.nx());
    int iy = edge == 2 ? 0 : (edge == 3 ? g.spec.ny() - 1 : k % g.spec.ny());
    g.at(ix, iy) += 5.0;
    double before = g.mass();
    HeatmapGrid s = smooth(g, sig(gen));
    CHECK(std::abs(s.mass() - before) <= 1e-6 * std::max(before, 1.0));
    for (double v : s.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("interior impulse reproduces the separable kernel") {
  GridSpec spec{0.0, 0.0, 2.1, 2.1, 0.1};  // 21x21, impulse well inside
  HeatmapGrid g = make_grid(spec);
  g.at(10, 10) = 1.0;
  const double sigma = 0.2;  // 2 cells
  HeatmapGrid s = smooth(g, sigma);

  const double sc = sigma / spec.cell;
  const int radius = static_cast<int>(std::ceil(3.0 * sc));
  double wsum = 0.0;
  for (int k = -radius; k <= radius; ++k)
    wsum += std::exp(-0.5 * (k / sc) * (k / sc));
  for (int dx = -radius; dx <= radius; ++dx)
    for (int dy = -radius; dy <= radius; ++dy) {
      double want = std::exp(-0.5 * (dx / sc) * (dx / sc)) / wsum *
                    std::exp(-0.5 * (dy / sc) * (dy / sc)) / wsum;
      CHECK(s.at(10 + dx, 10 + dy) == doctest::Approx(want).epsilon(1e-9));
    }
  CHECK(s.mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("corner impulse still sums to one") {
  HeatmapGrid g = make_grid(spec_10x8());
  g.at(0, 0) = 1.0;
  HeatmapGrid s = smooth(g, 0.3);
  CHECK(std::abs(s.mass() - 1.0) <= 1e-6);
}

TEST_CASE("zero grid smooths to zero and rejects bad sigma") {
  HeatmapGrid g = make_grid(spec_10x8());
  HeatmapGrid s = smooth(g, 0.5);
  for (double v : s.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(smooth(g, 0.0), sra::Error);
  CHECK_THROWS_AS(smooth(g, -1.0), sra::Error);
}

TEST_CASE("aggregate equals the scalar-loop mean") {
  std::mt19937_64 gen(43);
  std::vector<HeatmapGrid> maps;
  for (int m = 0; m < 5; ++m) maps.push_back(random_grid(gen, spec_10x8()));
  HeatmapGrid out = aggregate(maps);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double s = 0.0;
    for (const HeatmapGrid& m : maps) s += m.values[i];
    CHECK(std::abs(out.values[i] - s / 5.0) <= 1e-12);
  }
}

TEST_CASE("aggregate is permutation invariant and validates shapes") {
  std::mt19937_64 gen(44);
  std::vector<HeatmapGrid> maps;
  for (int m = 0; m < 4; ++m) maps.push_back(random_grid(gen, spec_10x8()));
  HeatmapGrid a = aggregate(maps);
  std::vector<HeatmapGrid> shuffled = {maps[2], maps[0], maps[3], maps[1]};
  HeatmapGrid b = aggregate(shuffled);
  CHECK(a.values == b.values);

  std::vector<HeatmapGrid> identical(3, maps[0]);
  HeatmapGrid c = aggregate(identical);
  for (std::size_t i = 0; i < c.values.size(); ++i)
    CHECK(c.values[i] == doctest::Approx(maps[0].values[i]).epsilon(1e-15));

  CHECK_THROWS_AS(aggregate(std::vector<HeatmapGrid>{}), sra::Error);
  std::vector<HeatmapGrid> mismatched = {maps[0],
                                         make_grid({0, 0, 2, 2, 0.1})};
  CHECK_THROWS_AS(aggregate(mismatched), sra::Error);
}

TEST_CASE("normalize scales the max to one and keeps zeros") {
  std::mt19937_64 gen(45);
  for (int k = 0; k < 20; ++k) {
    HeatmapGrid g = random_grid(gen, spec_10x8());
    if (g.max_value() == 0.0) g.at(1, 1) = 2.5;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < g.values.size(); ++i)
      if (g.values[i] > g.values[argmax]) argmax = i;
    HeatmapGrid n = normalize(g);
    CHECK(n.max_value() == doctest::Approx(1.0).epsilon(1e-15));
    for (double v : n.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    std::size_t argmax2 = 0;
    for (std::size_t i = 0; i < n.values.size(); ++i)
      if (n.values[i] > n.values[argmax2]) argmax2 = i;
    CHECK(argmax == argmax2);
  }
  HeatmapGrid zero = make_grid(spec_10x8());
  HeatmapGrid n = normalize(zero);
  CHECK(n.max_value() == 0.0);
}

TEST_CASE("bilinear sampling matches a direct interpolation oracle") {
  std::mt19937_64 gen(46);
  HeatmapGrid g = random_grid(gen, spec_10x8(), 1.0);
  const GridSpec& s = g.spec;
  std::uniform_real_distribution<double> px(s.min_x + 0.05 + s.cell,
                                            s.max_x - s.cell - 0.05);
  std::uniform_real_distribution<double> py(s.min_y + 0.05 + s.cell,
                                            s.max_y - s.cell - 0.05);
  for (int k = 0; k < 500; ++k) {
    Vec2 p{px(gen), py(gen)};
    double u = (p.x - s.min_x) / s.cell - 0.5;
    double v = (p.y - s.min_y) / s.cell - 0.5;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    double tu = u - i0;
    double tv = v - j0;
    double want = g.at(i0, j0) * (1 - tu) * (1 - tv) +
                  g.at(i0 + 1, j0) * tu * (1 - tv) +
                  g.at(i0, j0 + 1) * (1 - tu) * tv +
                  g.at(i0 + 1, j0 + 1) * tu * tv;
    CHECK(sra::sample_bilinear(g, p) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("position risk averages samples and handles empty input") {
  HeatmapGrid g = make_grid(spec_10x8());
  g.at(4, 4) = 2.0;
  HeatmapGrid n = normalize(g);
  // cell (4,4) center
  Vec2 peak{0.45, 0.45};
  CHECK(position_risk(n, {peak}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(position_risk(n, {}) == 0.0);
  CHECK(position_risk(n, {{50.0, 50.0}}) == 0.0);  // fully out of extent
  double pr = position_risk(n, {peak, {50.0, 50.0}});
  CHECK(pr == doctest::Approx(1.0).epsilon(1e-12));  // outsider excluded
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> c(0.0, 0.79);
  for (int k = 0; k < 50; ++k) {
    std::vector<Vec2> traj;
    for (int i = 0; i < 20; ++i) traj.push_back({c(gen), c(gen)});
    double v = position_risk(n, traj);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("grid csv round-trips exactly") {
  std::mt19937_64 gen(48);
  HeatmapGrid g = random_grid(gen, spec_10x8());
  std::string path =
      (std::filesystem::temp_directory_path() / "sra_test_grid.csv").string();
  sra::write_grid_csv(g, path);
  HeatmapGrid back = sra::read_grid_csv(path, g.spec);
  CHECK(back.values == g.values);
  std::remove(path.c_str());
}
