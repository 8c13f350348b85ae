#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/report.hpp"

namespace causalkit {

/// Column roles for CSV ingestion. Categorical columns are expanded to a
/// full one-hot group (no dropped level; the design stage appends no
/// intercept next to a full group, so there is no dummy trap to dodge by
/// dropping). Ordinal columns are parsed as numeric levels.
struct Schema {
  std::string treatment;
  std::string outcome;
  std::optional<std::string> weight;
  std::vector<std::string> categorical;
  std::vector<std::string> ordinal;

  static Schema from_json_file(const std::string& path);
  static Schema from_json_text(const std::string& text);
};

/// Rectangular sample: covariates X (n x p), binary treatment W, outcome Y,
/// strictly positive unit weights, and a missingness mask over X.
struct Dataset {
  Eigen::MatrixXd covariates;
  Eigen::VectorXd treatment;
  Eigen::VectorXd outcome;
  Eigen::VectorXd weights;
  std::vector<std::string> column_names;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing_mask;
  /// Column index ranges [first, last] of one-hot groups produced from a
  /// categorical column; members sum to exactly 1 per row.
  std::vector<std::pair<int, int>> onehot_groups;

  long n() const { return outcome.size(); }
  int p() const { return static_cast<int>(covariates.cols()); }
  bool has_missing() const { return missing_mask.size() > 0 && missing_mask.any(); }

  /// Checks the structural invariants (shared lengths, W in {0,1}, weights
  /// strictly positive, one-hot groups summing to 1 where observed).
  void validate() const;

  int column_index(const std::string& name) const;
};

Dataset load_csv(const std::string& path, const Schema& schema);

/// Writes a Dataset back to CSV (missing cells as empty strings) together
/// with the treatment/outcome/weight columns named by the schema.
void save_csv(const std::string& path, const Dataset& ds, const Schema& schema);

/// Weighted z-scores: weighted mean 0 and population (1/sum(w)) variance 1.
Eigen::VectorXd standardize(const Eigen::VectorXd& values, const Eigen::VectorXd& weights);

/// First-principal-component scores of a column-standardized binary
/// indicator matrix, computed by power iteration (tol 1e-9, <= 10000
/// iterations), re-standardized, and signed to correlate positively with
/// the per-row indicator count.
Eigen::VectorXd asset_index_pca(const Eigen::MatrixXd& indicators);

/// Child minus parent standardized score, elementwise.
Eigen::VectorXd intergenerational_outcome(const Eigen::VectorXd& child_scores,
                                          const Eigen::VectorXd& parent_scores);

/// Five-bin age cohort (1 = youngest). Boundaries are upper age limits of
/// the first four bins; defaults follow the survey's birth-year bins for a
/// 2015 interview year.
extern const std::array<double, 4> kDefaultCohortUpperAges;
int age_cohort(double age, const std::array<double, 4>& upper_ages = kDefaultCohortUpperAges);

/// Stochastic regression imputation: per incomplete column, least squares on
/// the complete columns fit within a bootstrap resample, plus a residual
/// draw; binary columns threshold at 0.5; one-hot groups impute by argmax so
/// the group still sums to 1. Complete cells are never modified.
std::vector<Dataset> impute(const Dataset& ds, int m, std::uint64_t seed);

/// Rubin's rules over per-imputation (estimate, se) pairs.
EstimateReport pool_estimates(const std::vector<std::pair<double, double>>& per_imputation,
                              Estimand estimand = Estimand::Ate,
                              const std::string& estimator = "pooled");

struct BalanceRow {
  std::string name;
  double mean_treated = 0.0;
  double mean_control = 0.0;
  double var_treated = 0.0;
  double var_control = 0.0;
  double smd_unweighted = 0.0;
  double smd_weighted = 0.0;
  bool flagged = false;  // weighted SMD above 0.1
};

struct BalanceTable {
  std::vector<BalanceRow> rows;
  double max_smd_unweighted() const;
  double max_smd_weighted() const;
  void write_csv(const std::string& path) const;
};

/// Standardized mean differences per covariate, both with unit weights and
/// with the supplied weights (frequency-weight means/variances, pooled
/// two-group denominator). Covariates with weighted SMD > 0.1 are flagged.
BalanceTable balance(const Dataset& ds, const Eigen::VectorXd& unit_weights);

}  // namespace causalkit
