#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

#include "sra/riskmodel.hpp"

using sra::BoostParams;
using sra::RiskModel;
using sra::sigmoid;
using sra::Tree;
using sra::TreeNode;

namespace {

struct Toy {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

// 40 rows, separable on feature 2; the rest is correlated noise.
Toy separable_toy(std::uint64_t seed = 7) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> low(0, 1);
  std::uniform_int_distribution<int> high(2, 5);
  Toy t;
  for (int i = 0; i < 40; ++i) {
    int label = i < 14 ? 1 : 0;
    std::vector<double> row(8);
    for (double& v : row) v = u(gen);
    row[2] = label ? high(gen) : low(gen);
    t.x.push_back(row);
    t.y.push_back(label);
  }
  return t;
}

Toy noisy_toy(std::uint64_t seed, int n = 60) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Toy t;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(8);
    for (double& v : row) v = u(gen);
    int label = row[0] + row[3] + 0.3 * u(gen) > 1.1 ? 1 : 0;
    t.x.push_back(row);
    t.y.push_back(label);
  }
  // make sure both classes exist
  t.y[0] = 1;
  t.y[1] = 0;
  return t;
}

int tree_depth(const Tree& t, int id = 0) {
  if (t.nodes.empty()) return 0;
  const TreeNode& nd = t.nodes[static_cast<std::size_t>(id)];
  if (nd.feature < 0) return 0;
  return 1 + std::max(tree_depth(t, nd.left), tree_depth(t, nd.right));
}

// independent path walk
double walk(const Tree& t, const std::vector<double>& x) {
  if (t.nodes.empty()) return 0.0;
  int id = 0;
  while (t.nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const TreeNode& nd = t.nodes[static_cast<std::size_t>(id)];
    double v = x[static_cast<std::size_t>(nd.feature)];
    id = (std::isnan(v) ? nd.default_left : v < nd.threshold) ? nd.left
                                                              : nd.right;
  }
  return t.nodes[static_cast<std::size_t>(id)].value;
}

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  return wins / static_cast<double>(pairs);
}

std::string stump_json(int feature, double threshold, double wl, double wr,
                       int n_features = 8) {
  std::string names;
  for (int f = 0; f < n_features; ++f) {
    if (f) names += ",";
    names += "\"f" + std::to_string(f) + "\"";
  }
  char buf[2048];
  std::snprintf(buf, sizeof buf, R"({
  "format": "risk-model", "version": 1,
  "n_features": %d, "base_logit": 0.0, "feature_names": [%s],
  "params": {"rounds": 1, "learning_rate": 1.0, "max_depth": 1,
             "row_subsample": 1.0, "feature_subsample": 1.0, "lambda": 1.0,
             "gamma": 0.0, "min_child_weight": 1.0, "pos_weight": 1.0,
             "base_score": 0.5, "seed": 0},
  "trees": [{"nodes": [
    {"feature": %d, "threshold": %.17g, "left": 1, "right": 2,
     "default_left": true, "leaf_weight": 0.0, "gain": 1.0},
    {"feature": -1, "threshold": 0.0, "left": -1, "right": -1,
     "default_left": true, "leaf_weight": %.17g, "gain": 0.0},
    {"feature": -1, "threshold": 0.0, "left": -1, "right": -1,
     "default_left": true, "leaf_weight": %.17g, "gain": 0.0}
  ]}]})",
                n_features, names.c_str(), feature, threshold, wl, wr);
  return buf;
}

}  // namespace

TEST_CASE("default training respects the depth bound") {
  Toy t = noisy_toy(11);
  RiskModel m = RiskModel::train(t.x, t.y, {});
  REQUIRE(m.trees().size() == 300);
  for (const Tree& tr : m.trees()) CHECK(tree_depth(tr) <= 4);
}

TEST_CASE("full-sample boosting never increases the weighted loss") {
  Toy t = noisy_toy(12);
  BoostParams p;
  p.row_subsample = 1.0;
  p.feature_subsample = 1.0;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  REQUIRE(m.trees().size() == 300);

  double pos_w = m.params().pos_weight;
  std::vector<double> margins(t.x.size(), m.base_logit());
  auto loss = [&]() {
    double l = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      double pr = sigmoid(margins[i]);
      double w = t.y[i] == 1 ? pos_w : 1.0;
      l += w * (t.y[i] == 1 ? -std::log(pr) : -std::log(1.0 - pr));
    }
    return l;
  };
  double prev = loss();
  for (const Tree& tr : m.trees()) {
    for (std::size_t i = 0; i < t.x.size(); ++i)
      margins[i] += tr.predict(t.x[i]);
    double cur = loss();
    CHECK(cur <= prev + 1e-9 * std::max(1.0, std::abs(prev)));
    prev = cur;
  }
}

TEST_CASE("separable toy reaches a perfect training ranking") {
  Toy t = separable_toy();
  BoostParams p;
  p.rounds = 200;
  p.row_subsample = 1.0;
  p.feature_subsample = 1.0;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  std::vector<double> scores = m.predict_batch(t.x);
  CHECK(pair_count_auc(scores, t.y) == 1.0);
}

TEST_CASE("two separable rows force a stump on the separating feature") {
  std::vector<std::vector<double>> x = {{0.0, 1.0}, {0.0, 3.0}};
  std::vector<int> y = {0, 1};
  BoostParams p;
  p.rounds = 1;
  p.row_subsample = 1.0;
  p.feature_subsample = 1.0;
  p.min_child_weight = 0.0;  // two rows carry less hessian than the default
  RiskModel m = RiskModel::train(x, y, p);
  REQUIRE(m.trees().size() == 1);
  const Tree& tr = m.trees()[0];
  REQUIRE(!tr.nodes.empty());
  CHECK(tr.nodes[0].feature == 1);
  CHECK(tr.nodes[0].threshold == 2.0);
  CHECK(m.predict(x[1]) > m.predict(x[0]));
}

TEST_CASE("degenerate inputs are rejected") {
  std::vector<std::vector<double>> x = {{0.0}, {1.0}};
  CHECK_THROWS_AS(RiskModel::train(x, {1, 1}, {}), sra::Error);
  CHECK_THROWS_AS(RiskModel::train(x, {0}, {}), sra::Error);
  CHECK_THROWS_AS(RiskModel::train({}, {}, {}), sra::Error);
  std::vector<std::vector<double>> nan_x = {{0.0}, {std::nan("")}};
  CHECK_THROWS_AS(RiskModel::train(nan_x, {0, 1}, {}), sra::Error);
  std::vector<std::vector<double>> ragged = {{0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(RiskModel::train(ragged, {0, 1}, {}), sra::Error);
  BoostParams bad;
  bad.rounds = 0;
  CHECK_THROWS_AS(RiskModel::train(x, {0, 1}, bad), sra::Error);
  bad = {};
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(RiskModel::train(x, {0, 1}, bad), sra::Error);
  bad = {};
  bad.row_subsample = 1.5;
  CHECK_THROWS_AS(RiskModel::train(x, {0, 1}, bad), sra::Error);
}

TEST_CASE("training is bitwise deterministic") {
  Toy t = noisy_toy(13);
  BoostParams p;
  p.rounds = 40;
  p.seed = 99;
  RiskModel a = RiskModel::train(t.x, t.y, p);
  RiskModel b = RiskModel::train(t.x, t.y, p);
  CHECK(a.to_json_text() == b.to_json_text());
  BoostParams p2 = p;
  p2.seed = 100;
  RiskModel c = RiskModel::train(t.x, t.y, p2);
  CHECK(a.to_json_text() != c.to_json_text());
}

TEST_CASE("predict equals an independent path walk") {
  Toy t = noisy_toy(14);
  BoostParams p;
  p.rounds = 50;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(8);
    for (double& v : x) v = u(gen);
    double margin = m.base_logit();
    for (const Tree& tr : m.trees()) margin += walk(tr, x);
    CHECK(m.predict_margin(x) == margin);
    CHECK(m.predict(x) == sigmoid(margin));
    CHECK(m.predict(x) > 0.0);
    CHECK(m.predict(x) < 1.0);
  }
}

TEST_CASE("empty model predicts its base score") {
  RiskModel m = RiskModel::make_empty(8, 0.5);
  std::vector<double> x(8, 3.0);
  CHECK(m.predict(x) == 0.5);
  CHECK(m.feature_importance() ==
        std::vector<double>(8, 0.0));
  RiskModel biased = RiskModel::make_empty(8, 0.25);
  CHECK(biased.predict(x) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("crafted stump predicts its leaves") {
  RiskModel m = RiskModel::from_json_text(stump_json(1, 2.0, 0.05, -0.05));
  std::vector<double> left(8, 0.0);
  left[1] = 1.0;
  std::vector<double> right(8, 0.0);
  right[1] = 3.0;
  CHECK(m.predict(left) == doctest::Approx(sigmoid(0.05)).epsilon(1e-15));
  CHECK(m.predict(right) == doctest::Approx(sigmoid(-0.05)).epsilon(1e-15));
  std::vector<double> missing(8, 0.0);
  missing[1] = std::nan("");
  CHECK(m.predict(missing) == doctest::Approx(sigmoid(0.05)).epsilon(1e-15));
  auto imp = m.feature_importance();
  CHECK(imp[1] == 1.0);
  CHECK(imp[0] == 0.0);
}

TEST_CASE("importance totals count internal nodes") {
  Toy t = noisy_toy(16);
  BoostParams p;
  p.rounds = 80;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  auto imp = m.feature_importance();
  double total = 0.0;
  for (double v : imp) {
    CHECK(v >= 0.0);
    total += v;
  }
  std::size_t internal = 0;
  for (const Tree& tr : m.trees())
    for (const TreeNode& nd : tr.nodes)
      if (nd.feature >= 0) ++internal;
  CHECK(total == static_cast<double>(internal));
}

TEST_CASE("save and load round-trip predictions bitwise") {
  Toy t = noisy_toy(17);
  BoostParams p;
  p.rounds = 120;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  std::string path =
      (std::filesystem::temp_directory_path() / "sra_test_model.json").string();
  m.save(path);
  RiskModel back = RiskModel::load(path);
  std::remove(path.c_str());

  std::mt19937_64 gen(18);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x(8);
    for (double& v : x) v = u(gen);
    CHECK(m.predict(x) == back.predict(x));
  }
  CHECK(back.to_json_text() == m.to_json_text());
}

TEST_CASE("model files validate their schema") {
  CHECK_THROWS_AS(RiskModel::from_json_text("{not json"), sra::Error);
  CHECK_THROWS_AS(RiskModel::from_json_text(R"({"format":"other"})"),
                  sra::Error);
  std::string v2 = stump_json(0, 1.0, 0.1, -0.1);
  auto pos = v2.find("\"version\": 1");
  v2.replace(pos, 12, "\"version\": 2");
  CHECK_THROWS_AS(RiskModel::from_json_text(v2), sra::Error);
  // child index out of range
  std::string bad = stump_json(0, 1.0, 0.1, -0.1);
  pos = bad.find("\"left\": 1");
  bad.replace(pos, 9, "\"left\": 9");
  CHECK_THROWS_AS(RiskModel::from_json_text(bad), sra::Error);
  std::string truncated = stump_json(0, 1.0, 0.1, -0.1);
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS_AS(RiskModel::from_json_text(truncated), sra::Error);
}

TEST_CASE("attribution is efficient for a trained ensemble") {
  Toy t = noisy_toy(19);
  BoostParams p;
  p.rounds = 60;
  RiskModel m = RiskModel::train(t.x, t.y, p);
  std::vector<std::vector<double>> bg(t.x.begin(), t.x.begin() + 10);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double>& x = t.x[static_cast<std::size_t>(k * 3)];
    RiskModel::Explanation ex = m.explain(x, bg);
    double total = ex.base;
    for (double a : ex.attribution) total += a;
    CHECK(std::abs(total - m.predict_margin(x)) < 1e-6);
  }
}

TEST_CASE("attribution matches a subset-enumeration oracle on 4 features") {
  std::mt19937_64 gen(20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> x4;
  std::vector<int> y4;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> row(4);
    for (double& v : row) v = u(gen);
    x4.push_back(row);
    y4.push_back(row[1] > 0.5 ? 1 : 0);
  }
  y4[0] = 1;
  y4[1] = 0;
  BoostParams p;
  p.rounds = 30;
  RiskModel m = RiskModel::train(x4, y4, p);
  std::vector<std::vector<double>> bg(x4.begin(), x4.begin() + 5);

  auto margin_of = [&](const std::vector<double>& z) {
    double s = m.base_logit();
    for (const Tree& tr : m.trees()) s += walk(tr, z);
    return s;
  };
  double fact[5] = {1, 1, 2, 6, 24};
  for (int inst = 0; inst < 5; ++inst) {
    const std::vector<double>& x = x4[static_cast<std::size_t>(inst * 4)];
    std::vector<double> value(16, 0.0);
    for (int mask = 0; mask < 16; ++mask) {
      for (const auto& b : bg) {
        std::vector<double> z(4);
        for (int f = 0; f < 4; ++f)
          z[static_cast<std::size_t>(f)] =
              (mask >> f) & 1 ? x[static_cast<std::size_t>(f)]
                              : b[static_cast<std::size_t>(f)];
        value[static_cast<std::size_t>(mask)] += margin_of(z);
      }
      value[static_cast<std::size_t>(mask)] /= static_cast<double>(bg.size());
    }
    RiskModel::Explanation ex = m.explain(x, bg);
    CHECK(std::abs(ex.base - value[0]) < 1e-9);
    for (int f = 0; f < 4; ++f) {
      double phi = 0.0;
      for (int mask = 0; mask < 16; ++mask) {
        if (mask & (1 << f)) continue;
        int s = 0;
        for (int g = 0; g < 4; ++g) s += (mask >> g) & 1;
        double w = fact[s] * fact[4 - s - 1] / fact[4];
        phi += w * (value[static_cast<std::size_t>(mask | (1 << f))] -
                    value[static_cast<std::size_t>(mask)]);
      }
      CHECK(std::abs(ex.attribution[static_cast<std::size_t>(f)] - phi) <
            1e-9);
    }
  }
}

TEST_CASE("attribution symmetry and degenerate cases") {
  // two stumps with mirrored roles on features 0 and 1
  RiskModel s0 = RiskModel::from_json_text(stump_json(0, 0.5, -0.3, 0.3));
  RiskModel s1 = RiskModel::from_json_text(stump_json(1, 0.5, -0.3, 0.3));
  // merge: stitch the second tree into the first model's file
  nlohmann::json merged = nlohmann::json::parse(s0.to_json_text());
  nlohmann::json second = nlohmann::json::parse(s1.to_json_text());
  merged["trees"].push_back(second["trees"][0]);
  RiskModel both = RiskModel::from_json_text(merged.dump());
  REQUIRE(both.trees().size() == 2);

  std::vector<double> x(8, 0.0);
  x[0] = 0.9;
  x[1] = 0.9;
  std::vector<std::vector<double>> bg = {std::vector<double>(8, 0.1)};
  RiskModel::Explanation ex = both.explain(x, bg);
  CHECK(std::abs(ex.attribution[0] - ex.attribution[1]) < 1e-12);

  // background equal to the instance: nothing to attribute
  RiskModel::Explanation none = both.explain(x, {x});
  for (double a : none.attribution) CHECK(std::abs(a) < 1e-12);
  CHECK(none.base == doctest::Approx(both.predict_margin(x)).epsilon(1e-12));

  // empty ensemble: base only
  RiskModel empty = RiskModel::make_empty(3, 0.5);
  RiskModel::Explanation e2 =
      empty.explain({1.0, 2.0, 3.0}, {std::vector<double>(3, 0.0)});
  CHECK(e2.base == 0.0);
  for (double a : e2.attribution) CHECK(a == 0.0);

  CHECK_THROWS_AS(both.explain(x, {}), sra::Error);
}
