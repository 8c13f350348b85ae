#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "causalkit/dataset.hpp"

namespace causalkit {

struct CtParams {
  int min_treated = 10;
  int min_control = 10;
  int max_depth = 6;
  int cv_folds = 5;
  int max_candidates = 256;  // per-feature threshold cap (rank-quantile positions)
};

/// Per-arm weighted sums over a node's estimation-sample units. Every node
/// carries its own aggregates, so collapsing a subtree never needs the data
/// again.
struct ArmSums {
  double sw = 0.0;    // sum of weights
  double sww = 0.0;   // sum of squared weights (effective n)
  double swy = 0.0;   // sum of w * y
  double swyy = 0.0;  // sum of w * y^2
  int count = 0;

  void add(double w, double y) {
    sw += w;
    sww += w * w;
    swy += w * y;
    swyy += w * y * y;
    ++count;
  }
  double mean() const { return swy / sw; }
  double var() const { return swyy / sw - mean() * mean(); }
  double effective_n() const { return sw * sw / sww; }
};

struct CtNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int depth = 0;
  // Honest (estimation-sample) effect and its two-sample variance.
  double tau = 0.0;
  double variance = 0.0;
  int n_treated = 0;
  int n_control = 0;
  ArmSums est_treated;
  ArmSums est_control;
  // Split-sample effect, kept for cross-validation and pruning records.
  double split_tau = 0.0;
};

/// Honest causal tree: structure chosen on the split half, effects estimated
/// on the disjoint estimation half. cv_gain holds the per-node held-out
/// criterion gain consumed by ct_prune (0 for leaves).
struct CausalTree {
  std::vector<CtNode> nodes;
  std::vector<int> split_sample_ids;
  std::vector<int> est_sample_ids;
  CtParams params;
  std::vector<double> cv_gain;
  int chosen_depth = 0;

  int leaf_count() const;
  int depth() const;
  int leaf_for(const Eigen::RowVectorXd& x) const;
  nlohmann::ordered_json to_json() const;
};

/// Fits on a 50/50 honest split. Tree depth is selected by cv_folds-fold
/// cross-validation on the split sample, scoring each depth by the held-out
/// analog of the splitting criterion; non-positive-gain fringe splits are
/// then pruned and leaf effects come from the estimation half only.
CausalTree ct_fit(const Dataset& ds, const CtParams& params, std::uint64_t seed);

/// Weakest-link style collapse: repeatedly turns internal nodes whose
/// children are leaves into leaves while their recorded held-out gain is
/// <= 0. The result is a subtree of the input.
CausalTree ct_prune(const CausalTree& tree, const std::vector<double>& cv_score_table);

Eigen::VectorXd ct_predict(const CausalTree& tree, const Eigen::MatrixXd& x);

}  // namespace causalkit
