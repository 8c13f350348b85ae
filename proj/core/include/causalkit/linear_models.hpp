#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace causalkit {

enum class RobustVariant { HC0, HC2, HC3 };

std::string to_string(RobustVariant v);

/// Weighted least-squares fit with a heteroskedasticity-robust sandwich
/// covariance. HC2 divides squared residuals by (1 - h_ii), HC3 by
/// (1 - h_ii)^2, with leverages from the weighted hat matrix.
struct LinearFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  RobustVariant variant = RobustVariant::HC3;
  Eigen::VectorXd residuals;
  Eigen::VectorXd leverage;
  long n_obs = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd se() const { return covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

/// Fits y ~ X with weights w. Column names, when given, are used to name the
/// offending column in the singular-design error. Rank is judged against
/// singular values below 1e-10 of the largest; near-dependence is an error,
/// never a silent pseudo-inverse.
LinearFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& w, RobustVariant variant,
                  const std::vector<std::string>& column_names = {});

struct LogisticFit {
  Eigen::VectorXd coefficients;
  bool converged = false;
  int iterations = 0;
  /// Weighted log-likelihood after each IRLS step; non-decreasing by
  /// construction (step halving).
  std::vector<double> ll_trace;
};

/// IRLS to max |gradient| < 1e-8 within 100 iterations. Detected separation
/// (diverging linear predictor) stops early with converged = false;
/// predictions from such fits are clamped into [1e-6, 1 - 1e-6].
LogisticFit logistic_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                         const Eigen::VectorXd& w);

Eigen::VectorXd predict_proba(const LogisticFit& fit, const Eigen::MatrixXd& x);

/// Indices of a maximal linearly independent subset of columns (tolerance
/// 1e-10 relative), in ascending order. Nuisance fitting uses this to shed
/// redundant one-hot levels; the public OLS contract errors instead.
std::vector<int> independent_columns(const Eigen::MatrixXd& x);

}  // namespace causalkit
