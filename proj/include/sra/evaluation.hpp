#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sra/heatmap.hpp"
#include "sra/indicators.hpp"
#include "sra/riskmodel.hpp"
#include "sra/types.hpp"

namespace sra {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
  bool operator==(const ConfusionCounts&) const = default;
};

struct EvalMetrics {
  double auc = 0.0;
  ConfusionCounts counts;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double fnr = 0.0;  // 1 - sensitivity
  double fpr = 0.0;  // 1 - specificity
};

// Rank-based AUC with tie averaging. Needs both classes present.
double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels);

// Positive call means score strictly above the threshold.
ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold);

EvalMetrics compute_metrics(const std::vector<double>& scores,
                            const std::vector<int>& labels, double threshold);

struct VideoGroup {
  std::string video_id;
  int n_pos = 0;
  int n_neg = 0;
};

// Deterministic greedy assignment of whole videos to bins, balancing both
// class counts against per-bin targets. Returns the bin index per group.
std::vector<int> assign_groups_to_bins(const std::vector<VideoGroup>& groups,
                                       const std::vector<double>& bin_weights,
                                       std::uint64_t seed);

struct GroupSplit {
  std::vector<std::string> train_videos;
  std::vector<std::string> test_videos;
};

// Whole videos land on one side; class proportions tracked greedily.
GroupSplit grouped_stratified_split(const std::vector<VideoGroup>& groups,
                                    double train_fraction, std::uint64_t seed);

std::vector<int> grouped_stratified_folds(const std::vector<VideoGroup>& groups,
                                          int k, std::uint64_t seed);

// One scored person: platform-space trajectory plus the window indicators.
// The position-risk component is recomputed per fold from training data only.
struct EvalItem {
  std::string video_id;
  int person_id = 0;
  int label = 0;
  std::vector<Vec2> platform_points;
  IndicatorVector indicators;
};

struct CrossValidateConfig {
  int folds = 10;
  std::uint64_t seed = 0;
  double threshold = 0.2;
  double sigma = 0.5;  // smoothing for the per-fold risk maps
  GridSpec grid;
  BoostParams boost;
};

struct FoldReport {
  int fold = 0;
  EvalMetrics metrics;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<std::string> test_videos;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

struct CvReport {
  std::vector<FoldReport> folds;
  Summary auc, sensitivity, specificity, fnr, fpr;
  double threshold = 0.2;
};

// Scores one fold's test rows; the default trains the boosted model on the
// training rows. Replaceable for protocol tests.
using FoldScorer = std::function<std::vector<double>(
    const std::vector<std::vector<double>>& x_train,
    const std::vector<int>& y_train,
    const std::vector<std::vector<double>>& x_test, int fold)>;

// Grouped k-fold evaluation with the position-risk map rebuilt per fold from
// the training-side at-risk trajectories.
CvReport cross_validate(const std::vector<EvalItem>& items,
                        const CrossValidateConfig& cfg,
                        const FoldScorer& scorer = {});

// Same protocol over precomputed indicator rows; features are used as-is.
CvReport cross_validate_fixed(const std::vector<IndicatorRow>& rows,
                              const CrossValidateConfig& cfg,
                              const FoldScorer& scorer = {});

std::string report_to_json_text(const CvReport& report);
std::string report_table(const CvReport& report);

}  // namespace sra
