#include "sra/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sra/rng.hpp"

namespace sra {

using nlohmann::json;

namespace {

void check_scored(const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::Data, "score and label counts differ");
  }
  if (scores.empty()) throw Error(ErrorKind::Data, "no scored items");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::Data, "non-finite score at index " +
                                       std::to_string(i));
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::Data, "labels must be 0 or 1");
    }
  }
}

}  // namespace

double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels) {
  check_scored(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Average 1-based ranks across tied scores.
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double pos_ranks = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] == 1) {
      pos_ranks += rank[k];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorKind::Data, "AUC needs both classes");
  }
  double np = static_cast<double>(n_pos);
  return (pos_ranks - np * (np + 1.0) / 2.0) /
         (np * static_cast<double>(n_neg));
}

ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels,
                             double threshold) {
  check_scored(scores, labels);
  ConfusionCounts c;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    bool called = scores[k] > threshold;
    if (labels[k] == 1) {
      (called ? c.tp : c.fn) += 1;
    } else {
      (called ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

EvalMetrics compute_metrics(const std::vector<double>& scores,
                            const std::vector<int>& labels, double threshold) {
  EvalMetrics m;
  m.auc = roc_auc(scores, labels);
  m.counts = confusion_at(scores, labels, threshold);
  m.sensitivity = static_cast<double>(m.counts.tp) /
                  static_cast<double>(m.counts.tp + m.counts.fn);
  m.specificity = static_cast<double>(m.counts.tn) /
                  static_cast<double>(m.counts.tn + m.counts.fp);
  m.fnr = 1.0 - m.sensitivity;
  m.fpr = 1.0 - m.specificity;
  return m;
}

std::vector<int> assign_groups_to_bins(const std::vector<VideoGroup>& groups,
                                       const std::vector<double>& bin_weights,
                                       std::uint64_t seed) {
  if (groups.empty()) throw Error(ErrorKind::Data, "no groups to assign");
  if (bin_weights.size() < 2) {
    throw Error(ErrorKind::Parameter, "need at least two bins");
  }
  for (double w : bin_weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::Parameter, "bin weights must be positive");
  }
  double total_pos = 0.0, total_neg = 0.0;
  for (const VideoGroup& g : groups) {
    if (g.n_pos < 0 || g.n_neg < 0 || g.n_pos + g.n_neg == 0) {
      throw Error(ErrorKind::Data, "bad group counts for " + g.video_id);
    }
    total_pos += g.n_pos;
    total_neg += g.n_neg;
  }

  // Largest groups first; the seeded shuffle orders equal-sized ones.
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return groups[a].n_pos + groups[a].n_neg >
                            groups[b].n_pos + groups[b].n_neg;
                   });

  const std::size_t n_bins = bin_weights.size();
  std::vector<double> bin_pos(n_bins, 0.0), bin_neg(n_bins, 0.0);
  std::vector<double> target_pos(n_bins), target_neg(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    target_pos[b] = total_pos * bin_weights[b];
    target_neg[b] = total_neg * bin_weights[b];
  }
  // Per-bin deviation from its target, squared and relative. A placement is
  // scored by how much it changes this, not by the absolute deviation it
  // lands on; the absolute form lets a bin close to target keep winning until
  // it overflows while other bins stay empty.
  auto bin_cost = [&](std::size_t b, double pos, double neg) {
    double dp = (pos - target_pos[b]) / std::max(target_pos[b], 1.0);
    double dn = (neg - target_neg[b]) / std::max(target_neg[b], 1.0);
    return dp * dp + dn * dn;
  };
  std::vector<int> assignment(groups.size(), -1);
  for (std::size_t gi : order) {
    const VideoGroup& g = groups[gi];
    std::size_t best = 0;
    double best_delta = std::numeric_limits<double>::infinity();
    double best_fill = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n_bins; ++b) {
      double delta = bin_cost(b, bin_pos[b] + g.n_pos, bin_neg[b] + g.n_neg) -
                     bin_cost(b, bin_pos[b], bin_neg[b]);
      double fill = (bin_pos[b] + bin_neg[b]) /
                    std::max(target_pos[b] + target_neg[b], 1e-9);
      bool better = delta < best_delta - 1e-12 ||
                    (delta <= best_delta + 1e-12 && fill < best_fill - 1e-12);
      if (better) {
        best = b;
        best_delta = delta;
        best_fill = fill;
      }
    }
    assignment[gi] = static_cast<int>(best);
    bin_pos[best] += g.n_pos;
    bin_neg[best] += g.n_neg;
  }
  return assignment;
}

GroupSplit grouped_stratified_split(const std::vector<VideoGroup>& groups,
                                    double train_fraction,
                                    std::uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw Error(ErrorKind::Parameter, "train_fraction must be in (0, 1)");
  }
  std::vector<int> bins = assign_groups_to_bins(
      groups, {train_fraction, 1.0 - train_fraction}, seed);
  GroupSplit split;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    (bins[i] == 0 ? split.train_videos : split.test_videos)
        .push_back(groups[i].video_id);
  }
  std::sort(split.train_videos.begin(), split.train_videos.end());
  std::sort(split.test_videos.begin(), split.test_videos.end());
  return split;
}

std::vector<int> grouped_stratified_folds(const std::vector<VideoGroup>& groups,
                                          int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Parameter, "need at least two folds");
  if (static_cast<std::size_t>(k) > groups.size()) {
    throw Error(ErrorKind::Data, "more folds than videos");
  }
  return assign_groups_to_bins(
      groups, std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), seed);
}

namespace {

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

template <typename ItemT>
std::vector<VideoGroup> group_by_video(const std::vector<ItemT>& items,
                                       const std::function<int(const ItemT&)>& label_of) {
  std::map<std::string, VideoGroup> by_video;
  for (const ItemT& it : items) {
    VideoGroup& g = by_video[it.video_id];
    g.video_id = it.video_id;
    (label_of(it) == 1 ? g.n_pos : g.n_neg) += 1;
  }
  std::vector<VideoGroup> groups;
  groups.reserve(by_video.size());
  for (auto& [_, g] : by_video) groups.push_back(g);
  return groups;
}

struct FoldSet {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::vector<std::string> test_videos;
};

// Fold membership per item, with a both-classes check on every fold.
template <typename ItemT>
std::vector<FoldSet> make_folds(const std::vector<ItemT>& items,
                                const std::vector<VideoGroup>& groups,
                                const std::vector<int>& group_bins, int k) {
  std::map<std::string, int> fold_of_video;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    fold_of_video[groups[i].video_id] = group_bins[i];
  }
  std::vector<FoldSet> folds(static_cast<std::size_t>(k));
  std::vector<int> fold_pos(static_cast<std::size_t>(k), 0);
  std::vector<int> fold_neg(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    int f = fold_of_video.at(items[i].video_id);
    for (int b = 0; b < k; ++b) {
      if (b == f) {
        folds[static_cast<std::size_t>(b)].test_idx.push_back(i);
      } else {
        folds[static_cast<std::size_t>(b)].train_idx.push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto f = static_cast<std::size_t>(group_bins[i]);
    folds[f].test_videos.push_back(groups[i].video_id);
    fold_pos[f] += groups[i].n_pos;
    fold_neg[f] += groups[i].n_neg;
  }
  for (int b = 0; b < k; ++b) {
    auto bi = static_cast<std::size_t>(b);
    if (fold_pos[bi] == 0 || fold_neg[bi] == 0) {
      throw Error(ErrorKind::Data,
                  "fold " + std::to_string(b) +
                      " is missing a class; not enough videos to stratify");
    }
    std::sort(folds[bi].test_videos.begin(), folds[bi].test_videos.end());
  }
  return folds;
}

FoldReport evaluate_fold(int fold, const std::vector<std::vector<double>>& x_train,
                         const std::vector<int>& y_train,
                         const std::vector<std::vector<double>>& x_test,
                         const std::vector<int>& y_test,
                         std::vector<std::string> test_videos,
                         const CrossValidateConfig& cfg,
                         const FoldScorer& scorer) {
  std::vector<double> scores;
  if (scorer) {
    scores = scorer(x_train, y_train, x_test, fold);
    if (scores.size() != x_test.size()) {
      throw Error(ErrorKind::Data, "fold scorer returned wrong score count");
    }
  } else {
    BoostParams params = cfg.boost;
    params.seed = cfg.boost.seed + static_cast<std::uint64_t>(fold);
    std::vector<std::string> names(IndicatorVector::feature_names().begin(),
                                   IndicatorVector::feature_names().end());
    if (!x_train.empty() && x_train[0].size() != names.size()) names.clear();
    RiskModel model = RiskModel::train(x_train, y_train, params, names);
    scores = model.predict_batch(x_test);
  }
  FoldReport report;
  report.fold = fold;
  report.metrics = compute_metrics(scores, y_test, cfg.threshold);
  report.n_train = x_train.size();
  report.n_test = x_test.size();
  report.test_videos = std::move(test_videos);
  return report;
}

CvReport finish_report(std::vector<FoldReport> folds, double threshold) {
  CvReport report;
  report.threshold = threshold;
  std::vector<double> aucs, sens, spec, fnrs, fprs;
  for (const FoldReport& f : folds) {
    aucs.push_back(f.metrics.auc);
    sens.push_back(f.metrics.sensitivity);
    spec.push_back(f.metrics.specificity);
    fnrs.push_back(f.metrics.fnr);
    fprs.push_back(f.metrics.fpr);
  }
  report.auc = summarize(aucs);
  report.sensitivity = summarize(sens);
  report.specificity = summarize(spec);
  report.fnr = summarize(fnrs);
  report.fpr = summarize(fprs);
  report.folds = std::move(folds);
  return report;
}

void check_cv_config(const CrossValidateConfig& cfg) {
  if (cfg.folds < 2) throw Error(ErrorKind::Parameter, "folds must be >= 2");
  if (!(cfg.threshold > 0.0) || !(cfg.threshold < 1.0)) {
    throw Error(ErrorKind::Parameter, "threshold must be in (0, 1)");
  }
  if (!(cfg.sigma > 0.0)) {
    throw Error(ErrorKind::Parameter, "sigma must be positive");
  }
  cfg.boost.validate();
}

std::string provenance_tag(const std::string& video_id, int person_id) {
  return video_id + ":" + std::to_string(person_id);
}

}  // namespace

CvReport cross_validate(const std::vector<EvalItem>& items,
                        const CrossValidateConfig& cfg,
                        const FoldScorer& scorer) {
  check_cv_config(cfg);
  cfg.grid.validate();
  if (items.empty()) throw Error(ErrorKind::Data, "no items to evaluate");
  for (const EvalItem& it : items) {
    if (it.label != 0 && it.label != 1) {
      throw Error(ErrorKind::Data, "labels must be 0 or 1");
    }
  }
  std::vector<VideoGroup> groups = group_by_video<EvalItem>(
      items, [](const EvalItem& it) { return it.label; });
  std::vector<int> bins = grouped_stratified_folds(groups, cfg.folds, cfg.seed);
  std::vector<FoldSet> folds = make_folds(items, groups, bins, cfg.folds);

  // Smoothed per-person maps for the at-risk trajectories, built once and
  // averaged per fold from the training side only.
  std::map<std::size_t, HeatmapGrid> person_maps;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].label != 1) continue;
    HeatmapGrid raw = accumulate(items[i].platform_points, cfg.grid).grid;
    HeatmapGrid smoothed = smooth(raw, cfg.sigma);
    smoothed.sources = {provenance_tag(items[i].video_id, items[i].person_id)};
    person_maps.emplace(i, std::move(smoothed));
  }

  std::vector<FoldReport> reports;
  for (int f = 0; f < cfg.folds; ++f) {
    const FoldSet& fs = folds[static_cast<std::size_t>(f)];
    std::vector<const HeatmapGrid*> train_maps;
    for (std::size_t i : fs.train_idx) {
      auto it = person_maps.find(i);
      if (it != person_maps.end()) train_maps.push_back(&it->second);
    }
    HeatmapGrid risk_map = normalize(aggregate(train_maps));
    std::set<std::string> held_out(fs.test_videos.begin(),
                                   fs.test_videos.end());
    for (const std::string& tag : risk_map.sources) {
      std::string video = tag.substr(0, tag.find(':'));
      if (held_out.count(video) != 0) {
        throw Error(ErrorKind::Data,
                    "risk map for fold " + std::to_string(f) +
                        " contains held-out video " + video);
      }
    }
    auto featurize = [&](std::size_t i) {
      auto arr = items[i].indicators.as_features();
      std::vector<double> x(arr.begin(), arr.end());
      x[0] = position_risk(risk_map, items[i].platform_points);
      return x;
    };
    std::vector<std::vector<double>> x_train, x_test;
    std::vector<int> y_train, y_test;
    for (std::size_t i : fs.train_idx) {
      x_train.push_back(featurize(i));
      y_train.push_back(items[i].label);
    }
    for (std::size_t i : fs.test_idx) {
      x_test.push_back(featurize(i));
      y_test.push_back(items[i].label);
    }
    reports.push_back(evaluate_fold(f, x_train, y_train, x_test, y_test,
                                    fs.test_videos, cfg, scorer));
  }
  return finish_report(std::move(reports), cfg.threshold);
}

CvReport cross_validate_fixed(const std::vector<IndicatorRow>& rows,
                              const CrossValidateConfig& cfg,
                              const FoldScorer& scorer) {
  check_cv_config(cfg);
  if (rows.empty()) throw Error(ErrorKind::Data, "no rows to evaluate");
  for (const IndicatorRow& r : rows) {
    if (!r.label) {
      throw Error(ErrorKind::Data, "row for " + r.video_id + ":" +
                                       std::to_string(r.person_id) +
                                       " has no label");
    }
  }
  std::vector<VideoGroup> groups = group_by_video<IndicatorRow>(
      rows, [](const IndicatorRow& r) { return *r.label; });
  std::vector<int> bins = grouped_stratified_folds(groups, cfg.folds, cfg.seed);
  std::vector<FoldSet> folds = make_folds(rows, groups, bins, cfg.folds);
  std::vector<FoldReport> reports;
  for (int f = 0; f < cfg.folds; ++f) {
    const FoldSet& fs = folds[static_cast<std::size_t>(f)];
    std::vector<std::vector<double>> x_train, x_test;
    std::vector<int> y_train, y_test;
    for (std::size_t i : fs.train_idx) {
      auto arr = rows[i].indicators.as_features();
      x_train.emplace_back(arr.begin(), arr.end());
      y_train.push_back(*rows[i].label);
    }
    for (std::size_t i : fs.test_idx) {
      auto arr = rows[i].indicators.as_features();
      x_test.emplace_back(arr.begin(), arr.end());
      y_test.push_back(*rows[i].label);
    }
    reports.push_back(evaluate_fold(f, x_train, y_train, x_test, y_test,
                                    fs.test_videos, cfg, scorer));
  }
  return finish_report(std::move(reports), cfg.threshold);
}

namespace {

json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}};
}

}  // namespace

std::string report_to_json_text(const CvReport& report) {
  json j;
  j["format"] = "cv-report";
  j["version"] = 1;
  j["threshold"] = report.threshold;
  json folds = json::array();
  for (const FoldReport& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"auc", f.metrics.auc},
                     {"sensitivity", f.metrics.sensitivity},
                     {"specificity", f.metrics.specificity},
                     {"fnr", f.metrics.fnr},
                     {"fpr", f.metrics.fpr},
                     {"tp", f.metrics.counts.tp},
                     {"fp", f.metrics.counts.fp},
                     {"tn", f.metrics.counts.tn},
                     {"fn", f.metrics.counts.fn},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"test_videos", f.test_videos}});
  }
  j["folds"] = std::move(folds);
  j["summary"] = {{"auc", summary_json(report.auc)},
                  {"sensitivity", summary_json(report.sensitivity)},
                  {"specificity", summary_json(report.specificity)},
                  {"fnr", summary_json(report.fnr)},
                  {"fpr", summary_json(report.fpr)}};
  return j.dump(2) + "\n";
}

std::string report_table(const CvReport& report) {
  std::ostringstream os;
  char line[128];
  os << "fold    auc   sens   spec    fnr    fpr  train   test\n";
  for (const FoldReport& f : report.folds) {
    std::snprintf(line, sizeof(line),
                  "%4d %6.3f %6.3f %6.3f %6.3f %6.3f %6zu %6zu\n", f.fold,
                  f.metrics.auc, f.metrics.sensitivity, f.metrics.specificity,
                  f.metrics.fnr, f.metrics.fpr, f.n_train, f.n_test);
    os << line;
  }
  os << "mean +/- sd over " << report.folds.size() << " folds (threshold "
     << report.threshold << ")\n";
  auto row = [&](const char* name, const Summary& s) {
    std::snprintf(line, sizeof(line), "%-12s %6.3f +/- %.3f\n", name, s.mean,
                  s.sd);
    os << line;
  };
  row("AUC", report.auc);
  row("Sensitivity", report.sensitivity);
  row("Specificity", report.specificity);
  row("FNR", report.fnr);
  row("FPR", report.fpr);
  return os.str();
}

}  // namespace sra
