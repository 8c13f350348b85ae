#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "causalkit/dataset.hpp"
#include "causalkit/report.hpp"

namespace causalkit {

struct ClipBounds {
  double lo = 0.01;
  double hi = 0.99;
};

/// Per-unit nuisance predictions: propensity e(x), marginal outcome m(x),
/// and the two potential-outcome surfaces. fold_id records the cross-fitting
/// fold of each unit (1..K); 0 throughout means out-of-bag cross-fitting,
/// where every prediction is leave-self-out by construction.
struct NuisanceEstimates {
  Eigen::VectorXd e_hat;
  Eigen::VectorXd m_hat;
  Eigen::VectorXd mu0_hat;
  Eigen::VectorXd mu1_hat;
  Eigen::VectorXi fold_id;
  ClipBounds clip;
  /// Variance of the mean outcome-surface contrast induced by the fitted
  /// model's coefficient noise; linear cross-fitting fills it in, other
  /// nuisance sources leave it at zero.
  double model_var = 0.0;

  void validate(long n) const;

  /// Builds the potential-outcome surfaces from (m, e, tau):
  /// mu0 = m - e * tau, mu1 = m + (1 - e) * tau.
  static NuisanceEstimates from_marginals(const Eigen::VectorXd& m_hat,
                                          const Eigen::VectorXd& e_hat,
                                          const Eigen::VectorXd& tau_hat,
                                          ClipBounds clip = {});
};

enum class IpwNormalization {
  Hajek,             // per-arm weights renormalized to sum 1 (default)
  HorvitzThompson,   // the literal 1/n sum
};

enum class AteTarget { All, Treated };

/// Weighted difference of arm means with a two-sample standard error
/// (effective sample sizes under frequency weights).
EstimateReport naive_diff(const Dataset& ds);

/// Mean of mu1(x) - mu0(x). The nuisance model's coefficient variance is
/// added to the sampling variance of the per-unit differences; pass an
/// explicit model_var to override nuis.model_var (0 disables).
EstimateReport reg_ate(const Dataset& ds, const NuisanceEstimates& nuis,
                       double model_var = -1.0);

EstimateReport ipw_ate(const Dataset& ds, const NuisanceEstimates& nuis,
                       IpwNormalization normalization = IpwNormalization::Hajek);

EstimateReport aipw_ate(const Dataset& ds, const NuisanceEstimates& nuis,
                        AteTarget target = AteTarget::All);

/// Per-unit doubly robust scores
///   G_i = tau(x_i) + W_i/e * (Y_i - mu1) - (1-W_i)/(1-e) * (Y_i - mu0)
/// with mu0 = m - e*tau and mu1 = m + (1-e)*tau.
Eigen::VectorXd aipw_scores(const Dataset& ds, const NuisanceEstimates& nuis,
                            const Eigen::VectorXd& tau_hat);

/// K-fold cross-fitted nuisances from linear models: logistic propensity,
/// per-arm least-squares outcome surfaces, m = e*mu1 + (1-e)*mu0.
NuisanceEstimates cross_fit_nuisances(const Dataset& ds, int k_folds, std::uint64_t seed,
                                      ClipBounds clip = {});

/// Weighted mean / sd / effective n helpers shared by the estimators.
double weighted_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w);
double weighted_sd(const Eigen::VectorXd& x, const Eigen::VectorXd& w);
double effective_n(const Eigen::VectorXd& w);

}  // namespace causalkit
