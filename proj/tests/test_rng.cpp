#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sra/rng.hpp"

using sra::Rng;

TEST_CASE("same seed and stream reproduce the sequence") {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("seed and stream changes decorrelate") {
  Rng a(42, 0);
  Rng b(43, 0);
  Rng c(42, 1);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 256; ++i) {
    std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++same_ab;
    if (va == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("uniform stays in its half-open range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("uniform mean is near one half") {
  Rng rng(9);
  double sum = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("below respects its bound") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) CHECK(rng.below(7) < 7);
  for (int i = 0; i < 100; ++i) CHECK(rng.below(1) == 0);
}

TEST_CASE("bernoulli edge probabilities") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(rng.bernoulli(0.0));
  for (int i = 0; i < 1000; ++i) CHECK(rng.bernoulli(1.0));
}

TEST_CASE("gaussian moments are roughly standard") {
  Rng rng(11);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("shuffle permutes and is seed-stable") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng a(17);
  Rng b(17);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
  // 50 elements almost surely move
  std::vector<int> id(50);
  std::iota(id.begin(), id.end(), 0);
  CHECK(v != id);
}
