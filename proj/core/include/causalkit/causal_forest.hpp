#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/dataset.hpp"
#include "causalkit/estimators.hpp"
#include "causalkit/regression_forest.hpp"
#include "causalkit/report.hpp"

namespace causalkit {

struct CfParams {
  int num_trees = 2000;
  int min_treated = 5;
  int min_control = 5;
  double subsample_fraction = 0.5;
  int mtry = 0;  // 0 = auto: min(p, ceil(sqrt(p) + 20))
  int max_depth = 30;
  int max_candidates = 256;
  ClipBounds clip;
  int stage1_trees = 500;  // nuisance regression forests
  std::uint64_t seed = 1;
};

/// One node of a residualized tree. Estimation-half aggregates are the
/// weighted leaf means of W_res * Y_res and W_res^2 needed by the forest-
/// weighted point estimate; every node keeps them so a degenerate leaf can
/// fall back to its ancestors.
struct CfNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int parent = -1;
  int depth = 0;
  double mean_wy = 0.0;   // sum(u * wres * yres) / sum(u) over est units
  double mean_ww = 0.0;   // sum(u * wres^2) / sum(u) over est units
  double sum_u = 0.0;     // sum of unit weights over est units
  int est_count = 0;
};

struct CfTree {
  std::vector<CfNode> nodes;
  std::vector<int> subsample;  // split half followed by estimation half
  int split_size = 0;

  int leaf_for(const Eigen::RowVectorXd& x) const;
};

/// Residual-on-residual causal forest. Stage 1 fits out-of-bag regression
/// forests for m(x) = E[Y|x] and e(x) = E[W|x]; stage 2 grows honest trees
/// on the residualized sample, splitting on heterogeneity of the local
/// slope pseudo-outcomes. Point estimates solve the forest-weighted local
/// least-squares problem in closed form.
struct CausalForest {
  std::vector<CfTree> trees;
  CfParams params;
  Dataset data;
  NuisanceEstimates nuisance;  // OOB m_hat / clipped e_hat, tau-consistent surfaces
  Eigen::VectorXd y_res;
  Eigen::VectorXd w_res;
  Eigen::VectorXd oob_tau;
  Eigen::VectorXd scores;  // per-unit doubly robust scores at oob_tau
  std::vector<std::vector<std::uint64_t>> in_bag;  // per-tree row bitmap
  int oob_uncovered = 0;
  int denominator_fallbacks = 0;
};

CausalForest cf_fit(const Dataset& ds, const CfParams& params, std::uint64_t seed);

/// Stage 2 only, on caller-supplied residuals; nuisance-dependent members
/// (scores, nuisance surfaces) are left empty. Exposed for the algebraic
/// invariants that hold exactly at fixed residuals.
CausalForest cf_fit_residualized(const Dataset& ds, const Eigen::VectorXd& y_res,
                                 const Eigen::VectorXd& w_res, const CfParams& params,
                                 std::uint64_t seed);

Eigen::VectorXd cf_predict(const CausalForest& forest, const Eigen::MatrixXd& x_query);

/// Forest similarity weights alpha_i(x) over training rows (estimation-half
/// co-membership, averaged over trees). With unit weights this is
/// (1/B) sum_b 1{i in leaf_b(x)} / |leaf_b(x)|.
Eigen::VectorXd cf_forest_weights(const CausalForest& forest, const Eigen::RowVectorXd& x);

EstimateReport cf_ate(const CausalForest& forest, AteTarget target = AteTarget::All);

/// Depth-weighted split frequencies (weight 0.5^depth, depths 0..4),
/// normalized to sum 1; all zeros for a forest with no splits.
Eigen::VectorXd cf_variable_importance(const CausalForest& forest);

/// Features with importance strictly above the mean importance.
std::vector<int> select_above_mean(const Eigen::VectorXd& importance);

struct SubgroupEffect {
  std::string label;
  std::optional<EstimateReport> report;
  std::string missing_reason;  // non-empty when report is absent
};

std::vector<SubgroupEffect> cf_subgroup_cate(const CausalForest& forest,
                                             const std::vector<std::string>& group_labels);

struct RankAteResult {
  std::vector<EstimateReport> per_rank;  // Q1..Qk
  bool degenerate = false;  // oob_tau had too few distinct values; single bin
};

/// Quantile ranking of out-of-bag CATE predictions (fold-respecting bins),
/// then a no-intercept regression of the doubly robust scores on the bin
/// dummies with HC2 covariance.
RankAteResult rank_average_effects(const Eigen::VectorXd& scores, const Eigen::VectorXd& tau_hat,
                                   const Eigen::VectorXd& weights, int num_rankings);

RankAteResult cf_rank_ate(const CausalForest& forest, int num_rankings);

struct CalibrationResult {
  double coef_mean = 0.0;
  double se_mean = 0.0;
  double coef_differential = 0.0;
  double se_differential = 0.0;
  bool differential_defined = true;
  double t_mean() const { return se_mean > 0.0 ? coef_mean / se_mean : 0.0; }
  double t_differential() const {
    return se_differential > 0.0 ? coef_differential / se_differential : 0.0;
  }
  /// One-sided p-value of the differential coefficient, the omnibus test for
  /// heterogeneity: small values mean the forest predictions carry signal.
  /// One-sided because out-of-bag predictions anti-correlate with their own
  /// unit's score noise, biasing the coefficient downward under the null.
  double p_differential() const;
};

/// Regression of scores on [mean(tau_hat), tau_hat - mean(tau_hat)] without
/// intercept, HC3 covariance. Coefficients near 1 indicate a calibrated
/// level and captured heterogeneity.
CalibrationResult calibration_test(const Eigen::VectorXd& scores, const Eigen::VectorXd& tau_hat,
                                   const Eigen::VectorXd& weights);

CalibrationResult cf_test_calibration(const CausalForest& forest);

struct BlpRow {
  std::string name;
  double coef = 0.0;
  double se = 0.0;
  double p_value = 1.0;
};

/// Doubly robust best linear projection: OLS of the scores on [1, A] with
/// HC3 covariance.
std::vector<BlpRow> best_linear_projection(const Eigen::VectorXd& scores,
                                           const Eigen::MatrixXd& a,
                                           const std::vector<std::string>& names,
                                           const Eigen::VectorXd& weights);

std::vector<BlpRow> cf_best_linear_projection(const CausalForest& forest,
                                              const Eigen::MatrixXd& a,
                                              const std::vector<std::string>& names);

}  // namespace causalkit
