#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace causalkit {

struct RfParams {
  int num_trees = 500;
  int min_leaf = 5;
  double subsample_fraction = 0.5;
  int mtry = 0;  // 0 = auto: min(p, ceil(sqrt(p) + 20))
  std::uint64_t seed = 1;
};

struct RfNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted mean outcome of the node's units
  int count = 0;
};

struct RfTree {
  std::vector<RfNode> nodes;
  std::vector<int> subsample;  // row indices, in sampling order

  double predict_one(const Eigen::RowVectorXd& x) const;
};

/// Subsampled (without replacement) regression forest with out-of-bag
/// predictions for every training row. Trees grow greedily on weighted
/// within-child squared error over mtry random features; each tree owns an
/// RNG stream derived from (seed, tree index), so parallel and serial fits
/// agree bit for bit.
struct RegressionForest {
  std::vector<RfTree> trees;
  RfParams params;
  Eigen::VectorXd oob_predictions;
  /// Rows covered by zero out-of-sample trees (refilled from the full
  /// forest); counted in oob_uncovered. Byte flags: written in parallel.
  std::vector<std::uint8_t> oob_uncovered_flags;
  int oob_uncovered = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

RegressionForest rf_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const RfParams& params, const Eigen::VectorXd& weights);

/// Same fit with caller-chosen subsamples (index lists in sampling order);
/// the permutation-invariance property is stated against this entry point.
RegressionForest rf_fit_with_subsamples(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const RfParams& params, const Eigen::VectorXd& weights,
                                        const std::vector<std::vector<int>>& subsamples);

/// The stored out-of-bag predictions (averaging only trees whose subsample
/// excludes the row).
Eigen::VectorXd rf_predict_oob(const RegressionForest& forest);

}  // namespace causalkit
