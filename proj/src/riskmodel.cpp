#include "sra/riskmodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sra/rng.hpp"

namespace sra {

using nlohmann::json;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

void BoostParams::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::Parameter, "boost params: " + what);
  };
  if (rounds < 1) bad("rounds must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    bad("learning_rate must be positive");
  }
  if (max_depth < 1) bad("max_depth must be >= 1");
  if (!(row_subsample > 0.0) || row_subsample > 1.0) {
    bad("row_subsample must be in (0, 1]");
  }
  if (!(feature_subsample > 0.0) || feature_subsample > 1.0) {
    bad("feature_subsample must be in (0, 1]");
  }
  if (lambda < 0.0) bad("lambda must be >= 0");
  if (gamma < 0.0) bad("gamma must be >= 0");
  if (min_child_weight < 0.0) bad("min_child_weight must be >= 0");
  if (pos_weight < 0.0) bad("pos_weight must be >= 0 (0 = auto)");
  if (!(base_score > 0.0) || !(base_score < 1.0)) {
    bad("base_score must be in (0, 1)");
  }
}

double Tree::predict(const std::vector<double>& x) const {
  if (nodes.empty()) return 0.0;
  int id = 0;
  while (nodes[id].feature >= 0) {
    const TreeNode& nd = nodes[id];
    double v = x[static_cast<std::size_t>(nd.feature)];
    bool go_left = std::isnan(v) ? nd.default_left : v < nd.threshold;
    id = go_left ? nd.left : nd.right;
  }
  return nodes[id].value;
}

namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  bool default_left = true;
};

SplitChoice find_split(const std::vector<std::vector<double>>& X,
                       const std::vector<double>& g,
                       const std::vector<double>& h,
                       const std::vector<int>& rows,
                       const std::vector<int>& features,
                       const BoostParams& p) {
  double G = 0.0, H = 0.0;
  for (int i : rows) {
    G += g[i];
    H += h[i];
  }
  const double parent_score = G * G / (H + p.lambda);
  SplitChoice best;
  best.gain = kMinGain;
  std::vector<std::pair<double, int>> order;
  order.reserve(rows.size());
  for (int f : features) {
    order.clear();
    for (int i : rows) {
      order.emplace_back(X[i][static_cast<std::size_t>(f)], i);
    }
    std::sort(order.begin(), order.end());
    double GL = 0.0, HL = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
      GL += g[order[k - 1].second];
      HL += h[order[k - 1].second];
      if (order[k - 1].first == order[k].first) continue;
      double thr = 0.5 * (order[k - 1].first + order[k].first);
      if (!(thr > order[k - 1].first)) continue;  // values too close to split
      double GR = G - GL, HR = H - HL;
      if (HL < p.min_child_weight || HR < p.min_child_weight) continue;
      double gain = 0.5 * (GL * GL / (HL + p.lambda) +
                           GR * GR / (HR + p.lambda) - parent_score) -
                    p.gamma;
      if (gain > best.gain) {
        best.found = true;
        best.feature = f;
        best.threshold = thr;
        best.gain = gain;
        best.default_left = HL >= HR;
      }
    }
  }
  return best;
}

int build_node(std::vector<TreeNode>& nodes,
               const std::vector<std::vector<double>>& X,
               const std::vector<double>& g, const std::vector<double>& h,
               const std::vector<int>& rows,
               const std::vector<int>& features, int depth,
               const BoostParams& p) {
  int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  SplitChoice split;
  if (depth < p.max_depth) {
    split = find_split(X, g, h, rows, features, p);
  }
  if (!split.found) {
    double G = 0.0, H = 0.0;
    for (int i : rows) {
      G += g[i];
      H += h[i];
    }
    nodes[id].value = -G / (H + p.lambda) * p.learning_rate;
    return id;
  }
  std::vector<int> left_rows, right_rows;
  for (int i : rows) {
    double v = X[i][static_cast<std::size_t>(split.feature)];
    bool go_left = std::isnan(v) ? split.default_left : v < split.threshold;
    (go_left ? left_rows : right_rows).push_back(i);
  }
  int left = build_node(nodes, X, g, h, left_rows, features, depth + 1, p);
  int right = build_node(nodes, X, g, h, right_rows, features, depth + 1, p);
  nodes[id].feature = split.feature;
  nodes[id].threshold = split.threshold;
  nodes[id].gain = split.gain;
  nodes[id].default_left = split.default_left;
  nodes[id].left = left;
  nodes[id].right = right;
  return id;
}

std::vector<int> subsample_sorted(Rng& rng, int n, double fraction) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  auto keep = static_cast<std::size_t>(
      std::lround(static_cast<double>(n) * fraction));
  keep = std::clamp<std::size_t>(keep, 1, idx.size());
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

RiskModel RiskModel::make_empty(int n_features, double base_score,
                                const std::vector<std::string>& feature_names) {
  if (n_features < 1) {
    throw Error(ErrorKind::Parameter, "n_features must be >= 1");
  }
  if (!(base_score > 0.0) || !(base_score < 1.0)) {
    throw Error(ErrorKind::Parameter, "base_score must be in (0, 1)");
  }
  RiskModel m;
  m.n_features_ = n_features;
  m.params_.base_score = base_score;
  m.base_logit_ = std::log(base_score / (1.0 - base_score));
  if (!feature_names.empty()) {
    if (static_cast<int>(feature_names.size()) != n_features) {
      throw Error(ErrorKind::Parameter, "feature name count mismatch");
    }
    m.feature_names_ = feature_names;
  } else {
    for (int f = 0; f < n_features; ++f) {
      m.feature_names_.push_back("f" + std::to_string(f));
    }
  }
  return m;
}

RiskModel RiskModel::train(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels,
                           const BoostParams& params,
                           const std::vector<std::string>& feature_names) {
  params.validate();
  if (features.empty()) {
    throw Error(ErrorKind::Data, "training set is empty");
  }
  if (features.size() != labels.size()) {
    throw Error(ErrorKind::Data, "feature and label counts differ");
  }
  const std::size_t nf = features[0].size();
  if (nf == 0) throw Error(ErrorKind::Data, "rows have no features");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != nf) {
      throw Error(ErrorKind::Data, "inconsistent feature count at row " +
                                       std::to_string(i));
    }
    for (double v : features[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::Data, "non-finite feature value at row " +
                                         std::to_string(i));
      }
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::Data,
                  "labels must be 0 or 1, got " + std::to_string(labels[i]));
    }
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t n = features.size();
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorKind::Data, "training set needs both classes");
  }

  RiskModel model;
  model.n_features_ = static_cast<int>(nf);
  model.params_ = params;
  if (model.params_.pos_weight == 0.0) {
    model.params_.pos_weight =
        static_cast<double>(n_neg) / static_cast<double>(n_pos);
  }
  model.base_logit_ = std::log(params.base_score / (1.0 - params.base_score));
  if (!feature_names.empty()) {
    if (feature_names.size() != nf) {
      throw Error(ErrorKind::Parameter, "feature name count mismatch");
    }
    model.feature_names_ = feature_names;
  } else {
    for (std::size_t f = 0; f < nf; ++f) {
      model.feature_names_.push_back("f" + std::to_string(f));
    }
  }

  const double pos_w = model.params_.pos_weight;
  std::vector<double> margins(n, model.base_logit_);
  std::vector<double> g(n), h(n);
  Rng rng(params.seed);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margins[i]);
      double w = labels[i] == 1 ? pos_w : 1.0;
      g[i] = w * (p - static_cast<double>(labels[i]));
      h[i] = w * p * (1.0 - p);
    }
    std::vector<int> rows =
        subsample_sorted(rng, static_cast<int>(n), params.row_subsample);
    std::vector<int> feats =
        subsample_sorted(rng, static_cast<int>(nf), params.feature_subsample);
    Tree tree;
    build_node(tree.nodes, features, g, h, rows, feats, 0, model.params_);
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += tree.predict(features[i]);
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double RiskModel::predict_margin(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_features_) {
    throw Error(ErrorKind::Parameter,
                "expected " + std::to_string(n_features_) + " features, got " +
                    std::to_string(x.size()));
  }
  double m = base_logit_;
  for (const Tree& t : trees_) m += t.predict(x);
  return m;
}

double RiskModel::predict(const std::vector<double>& x) const {
  return sigmoid(predict_margin(x));
}

std::vector<double> RiskModel::predict_batch(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

std::vector<double> RiskModel::feature_importance() const {
  // F-score style: how many internal nodes split on each feature.
  std::vector<double> counts(static_cast<std::size_t>(n_features_), 0.0);
  for (const Tree& t : trees_) {
    for (const TreeNode& nd : t.nodes) {
      if (nd.feature >= 0) counts[static_cast<std::size_t>(nd.feature)] += 1.0;
    }
  }
  return counts;
}

RiskModel::Explanation RiskModel::explain(
    const std::vector<double>& x,
    const std::vector<std::vector<double>>& background) const {
  if (static_cast<int>(x.size()) != n_features_) {
    throw Error(ErrorKind::Parameter, "instance feature count mismatch");
  }
  if (background.empty()) {
    throw Error(ErrorKind::Parameter, "background set is empty");
  }
  for (const auto& b : background) {
    if (static_cast<int>(b.size()) != n_features_) {
      throw Error(ErrorKind::Parameter, "background feature count mismatch");
    }
  }
  const int nf = n_features_;
  if (nf > 20) {
    throw Error(ErrorKind::Parameter,
                "exact attribution supports at most 20 features");
  }
  const std::size_t n_masks = std::size_t{1} << nf;

  // Coalition value: mean margin with coalition features from x and the rest
  // from each background row in turn.
  std::vector<double> value(n_masks, 0.0);
  std::vector<double> z(static_cast<std::size_t>(nf));
  for (const auto& b : background) {
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      for (int f = 0; f < nf; ++f) {
        z[static_cast<std::size_t>(f)] =
            (mask >> f) & 1 ? x[static_cast<std::size_t>(f)]
                            : b[static_cast<std::size_t>(f)];
      }
      double m = base_logit_;
      for (const Tree& t : trees_) m += t.predict(z);
      value[mask] += m;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(background.size());
  for (double& v : value) v *= inv_b;

  // weight(|S|) = |S|! (nf-1-|S|)! / nf! = 1 / (nf * C(nf-1, |S|))
  std::vector<double> weight(static_cast<std::size_t>(nf));
  double binom = 1.0;
  for (int s = 0; s < nf; ++s) {
    weight[static_cast<std::size_t>(s)] = 1.0 / (nf * binom);
    binom = binom * (nf - 1 - s) / (s + 1);
  }

  Explanation out;
  out.base = value[0];
  out.attribution.assign(static_cast<std::size_t>(nf), 0.0);
  for (int f = 0; f < nf; ++f) {
    const std::size_t bit = std::size_t{1} << f;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      int s = std::popcount(mask);
      out.attribution[static_cast<std::size_t>(f)] +=
          weight[static_cast<std::size_t>(s)] *
          (value[mask | bit] - value[mask]);
    }
  }
  return out;
}

std::string RiskModel::to_json_text() const {
  json j;
  j["format"] = "risk-model";
  j["version"] = 1;
  j["n_features"] = n_features_;
  j["base_logit"] = base_logit_;
  j["feature_names"] = feature_names_;
  j["params"] = {{"rounds", params_.rounds},
                 {"learning_rate", params_.learning_rate},
                 {"max_depth", params_.max_depth},
                 {"row_subsample", params_.row_subsample},
                 {"feature_subsample", params_.feature_subsample},
                 {"lambda", params_.lambda},
                 {"gamma", params_.gamma},
                 {"min_child_weight", params_.min_child_weight},
                 {"pos_weight", params_.pos_weight},
                 {"base_score", params_.base_score},
                 {"seed", params_.seed}};
  json trees = json::array();
  for (const Tree& t : trees_) {
    json nodes = json::array();
    for (const TreeNode& nd : t.nodes) {
      nodes.push_back({{"feature", nd.feature},
                       {"threshold", nd.threshold},
                       {"left", nd.left},
                       {"right", nd.right},
                       {"default_left", nd.default_left},
                       {"leaf_weight", nd.value},
                       {"gain", nd.gain}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump(2) + "\n";
}

RiskModel RiskModel::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model json: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "risk-model") {
      throw Error(ErrorKind::Schema, "not a risk-model file");
    }
    if (j.at("version").get<int>() != 1) {
      throw Error(ErrorKind::Schema, "unsupported model version " +
                                         j.at("version").dump());
    }
    RiskModel m;
    m.n_features_ = j.at("n_features").get<int>();
    if (m.n_features_ < 1) {
      throw Error(ErrorKind::Schema, "n_features must be >= 1");
    }
    m.base_logit_ = j.at("base_logit").get<double>();
    m.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    if (static_cast<int>(m.feature_names_.size()) != m.n_features_) {
      throw Error(ErrorKind::Schema, "feature_names length mismatch");
    }
    const json& p = j.at("params");
    m.params_.rounds = p.at("rounds").get<int>();
    m.params_.learning_rate = p.at("learning_rate").get<double>();
    m.params_.max_depth = p.at("max_depth").get<int>();
    m.params_.row_subsample = p.at("row_subsample").get<double>();
    m.params_.feature_subsample = p.at("feature_subsample").get<double>();
    m.params_.lambda = p.at("lambda").get<double>();
    m.params_.gamma = p.at("gamma").get<double>();
    m.params_.min_child_weight = p.at("min_child_weight").get<double>();
    m.params_.pos_weight = p.at("pos_weight").get<double>();
    m.params_.base_score = p.at("base_score").get<double>();
    m.params_.seed = p.at("seed").get<std::uint64_t>();
    for (const json& jt : j.at("trees")) {
      Tree t;
      for (const json& jn : jt.at("nodes")) {
        TreeNode nd;
        nd.feature = jn.at("feature").get<int>();
        nd.threshold = jn.at("threshold").get<double>();
        nd.left = jn.at("left").get<int>();
        nd.right = jn.at("right").get<int>();
        nd.default_left = jn.at("default_left").get<bool>();
        nd.value = jn.at("leaf_weight").get<double>();
        nd.gain = jn.at("gain").get<double>();
        if (nd.feature >= m.n_features_) {
          throw Error(ErrorKind::Schema, "node feature index out of range");
        }
        t.nodes.push_back(nd);
      }
      const int count = static_cast<int>(t.nodes.size());
      for (const TreeNode& nd : t.nodes) {
        if (nd.feature >= 0 &&
            (nd.left < 0 || nd.left >= count || nd.right < 0 ||
             nd.right >= count)) {
          throw Error(ErrorKind::Schema, "node child index out of range");
        }
      }
      m.trees_.push_back(std::move(t));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("model json: ") + e.what());
  }
}

void RiskModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << to_json_text();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

RiskModel RiskModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace sra
