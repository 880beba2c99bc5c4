#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sra/types.hpp"

namespace sra {

struct BoostParams {
  int rounds = 300;
  double learning_rate = 0.05;
  int max_depth = 4;
  double row_subsample = 0.85;
  double feature_subsample = 0.85;
  double lambda = 1.0;            // L2 on leaf weights
  double gamma = 0.0;             // split gain penalty
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double pos_weight = 0.0;        // 0 = auto (n_neg / n_pos)
  double base_score = 0.5;        // prior probability
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  bool default_left = true;  // side taken when the feature value is NaN
  double value = 0.0;        // leaf weight
  double gain = 0.0;         // split gain, internal nodes only
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const std::vector<double>& x) const;
};

class RiskModel {
 public:
  static RiskModel train(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels,
                         const BoostParams& params,
                         const std::vector<std::string>& feature_names = {});

  // Tree-less model predicting sigmoid(base_logit) everywhere.
  static RiskModel make_empty(int n_features, double base_score = 0.5,
                              const std::vector<std::string>& feature_names = {});

  double predict_margin(const std::vector<double>& x) const;
  double predict(const std::vector<double>& x) const;  // sigmoid(margin)
  std::vector<double> predict_batch(
      const std::vector<std::vector<double>>& rows) const;

  // F-score style importance: split-node count per feature.
  std::vector<double> feature_importance() const;

  // Exact Shapley values of the margin against a background sample set.
  // attribution[i] sums with base to predict_margin(x).
  struct Explanation {
    std::vector<double> attribution;
    double base = 0.0;
  };
  Explanation explain(const std::vector<double>& x,
                      const std::vector<std::vector<double>>& background) const;

  int n_features() const { return n_features_; }
  double base_logit() const { return base_logit_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const BoostParams& params() const { return params_; }

  std::string to_json_text() const;
  static RiskModel from_json_text(const std::string& text);
  void save(const std::string& path) const;
  static RiskModel load(const std::string& path);

 private:
  int n_features_ = 0;
  double base_logit_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<std::string> feature_names_;
  BoostParams params_;
};

double sigmoid(double t);

}  // namespace sra
