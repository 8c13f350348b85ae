#include "causalkit/estimators.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "causalkit/errors.hpp"
#include "causalkit/linear_models.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

double weighted_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  return x.dot(w) / w.sum();
}

double weighted_sd(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const double m = weighted_mean(x, w);
  return std::sqrt((w.array() * (x.array() - m).square()).sum() / w.sum());
}

double effective_n(const Eigen::VectorXd& w) {
  const double s = w.sum();
  return s * s / w.squaredNorm();
}

void NuisanceEstimates::validate(long n) const {
  if (e_hat.size() != n) throw DataError("nuisances: e_hat missing or mis-sized");
  for (long i = 0; i < n; ++i) {
    if (!(e_hat[i] >= clip.lo && e_hat[i] <= clip.hi)) {
      throw DataError("nuisances: e_hat outside clip bounds at row " + std::to_string(i + 1));
    }
  }
}

NuisanceEstimates NuisanceEstimates::from_marginals(const Eigen::VectorXd& m_hat,
                                                    const Eigen::VectorXd& e_hat,
                                                    const Eigen::VectorXd& tau_hat,
                                                    ClipBounds clip) {
  if (m_hat.size() != e_hat.size() || tau_hat.size() != e_hat.size()) {
    throw DataError("nuisances: length mismatch");
  }
  NuisanceEstimates nuis;
  nuis.clip = clip;
  nuis.e_hat = e_hat.cwiseMax(clip.lo).cwiseMin(clip.hi);
  nuis.m_hat = m_hat;
  nuis.mu0_hat = m_hat - nuis.e_hat.cwiseProduct(tau_hat);
  nuis.mu1_hat = m_hat + (Eigen::VectorXd::Ones(e_hat.size()) - nuis.e_hat).cwiseProduct(tau_hat);
  nuis.fold_id = Eigen::VectorXi::Zero(e_hat.size());
  return nuis;
}

EstimateReport naive_diff(const Dataset& ds) {
  const long n = ds.n();
  std::vector<long> t_rows, c_rows;
  for (long i = 0; i < n; ++i) (ds.treatment[i] == 1.0 ? t_rows : c_rows).push_back(i);
  if (t_rows.empty() || c_rows.empty()) throw DataError("naive_diff: an arm is empty");

  auto arm_stats = [&](const std::vector<long>& rows) {
    Eigen::VectorXd y(static_cast<long>(rows.size())), w(static_cast<long>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      y[static_cast<long>(k)] = ds.outcome[rows[k]];
      w[static_cast<long>(k)] = ds.weights[rows[k]];
    }
    const double m = weighted_mean(y, w);
    const double sd = weighted_sd(y, w);
    return std::tuple<double, double, double>{m, sd * sd, effective_n(w)};
  };

  const auto [m1, v1, n1] = arm_stats(t_rows);
  const auto [m0, v0, n0] = arm_stats(c_rows);
  const double se = std::sqrt(v1 / n1 + v0 / n0);
  return make_report(Estimand::Ate, "naive", m1 - m0, se, n);
}

EstimateReport reg_ate(const Dataset& ds, const NuisanceEstimates& nuis, double model_var) {
  const long n = ds.n();
  if (nuis.mu0_hat.size() != n || nuis.mu1_hat.size() != n) {
    throw DataError("reg_ate: outcome nuisances missing");
  }
  if (model_var < 0.0) model_var = nuis.model_var;
  const Eigen::VectorXd diff = nuis.mu1_hat - nuis.mu0_hat;
  const double est = weighted_mean(diff, ds.weights);
  const double sd = weighted_sd(diff, ds.weights);
  const double se = std::sqrt(sd * sd / effective_n(ds.weights) + model_var);
  return make_report(Estimand::Ate, "regression", est, se, n);
}

EstimateReport ipw_ate(const Dataset& ds, const NuisanceEstimates& nuis,
                       IpwNormalization normalization) {
  const long n = ds.n();
  if (nuis.e_hat.size() != n) throw DataError("ipw_ate: propensities missing");
  for (long i = 0; i < n; ++i) {
    if (!(nuis.e_hat[i] > 0.0 && nuis.e_hat[i] < 1.0)) {
      throw DataError("ipw_ate: unclipped propensity at row " + std::to_string(i + 1));
    }
  }

  const auto& w = ds.treatment;
  const auto& y = ds.outcome;
  const auto& u = ds.weights;
  const auto& e = nuis.e_hat;

  if (normalization == IpwNormalization::HorvitzThompson) {
    Eigen::VectorXd s(n);
    const double u_mean = u.mean();
    for (long i = 0; i < n; ++i) {
      s[i] = (u[i] / u_mean) * (w[i] * y[i] / e[i] - (1.0 - w[i]) * y[i] / (1.0 - e[i]));
    }
    const double est = s.mean();
    const double se = std::sqrt((s.array() - est).square().sum() / n) / std::sqrt(double(n));
    return make_report(Estimand::Ate, "ipw", est, se, n);
  }

  Eigen::VectorXd a(n), b(n);
  for (long i = 0; i < n; ++i) {
    a[i] = u[i] * w[i] / e[i];
    b[i] = u[i] * (1.0 - w[i]) / (1.0 - e[i]);
  }
  const double t1 = a.dot(y) / a.sum();
  const double t0 = b.dot(y) / b.sum();
  const double a_mean = a.mean(), b_mean = b.mean();
  Eigen::VectorXd psi(n);
  for (long i = 0; i < n; ++i) {
    psi[i] = a[i] * (y[i] - t1) / a_mean - b[i] * (y[i] - t0) / b_mean;
  }
  const double se = std::sqrt(psi.squaredNorm() / n) / std::sqrt(double(n));
  return make_report(Estimand::Ate, "ipw", t1 - t0, se, n);
}

Eigen::VectorXd aipw_scores(const Dataset& ds, const NuisanceEstimates& nuis,
                            const Eigen::VectorXd& tau_hat) {
  const long n = ds.n();
  if (tau_hat.size() != n) throw DataError("aipw_scores: tau length mismatch");
  if (nuis.m_hat.size() != n) throw DataError("aipw_scores: m_hat missing");
  nuis.validate(n);

  Eigen::VectorXd scores(n);
  for (long i = 0; i < n; ++i) {
    const double e = nuis.e_hat[i];
    const double mu0 = nuis.m_hat[i] - e * tau_hat[i];
    const double mu1 = nuis.m_hat[i] + (1.0 - e) * tau_hat[i];
    scores[i] = tau_hat[i] + ds.treatment[i] / e * (ds.outcome[i] - mu1) -
                (1.0 - ds.treatment[i]) / (1.0 - e) * (ds.outcome[i] - mu0);
  }
  return scores;
}

EstimateReport aipw_ate(const Dataset& ds, const NuisanceEstimates& nuis, AteTarget target) {
  const long n = ds.n();
  if (nuis.mu0_hat.size() != n || nuis.mu1_hat.size() != n) {
    throw DataError("aipw_ate: outcome nuisances missing");
  }
  nuis.validate(n);
  const auto& w = ds.treatment;
  const auto& y = ds.outcome;
  const auto& u = ds.weights;
  const auto& e = nuis.e_hat;

  if (target == AteTarget::All) {
    Eigen::VectorXd scores(n);
    for (long i = 0; i < n; ++i) {
      scores[i] = nuis.mu1_hat[i] - nuis.mu0_hat[i] +
                  w[i] / e[i] * (y[i] - nuis.mu1_hat[i]) -
                  (1.0 - w[i]) / (1.0 - e[i]) * (y[i] - nuis.mu0_hat[i]);
    }
    const double est = weighted_mean(scores, u);
    const double se = weighted_sd(scores, u) / std::sqrt(effective_n(u));
    return make_report(Estimand::Ate, "aipw", est, se, n);
  }

  // ATT: control corrections re-weighted by e/(1-e), averaged over the
  // treated share.
  Eigen::VectorXd num(n);
  for (long i = 0; i < n; ++i) {
    const double resid0 = y[i] - nuis.mu0_hat[i];
    num[i] = w[i] * resid0 - (1.0 - w[i]) * e[i] / (1.0 - e[i]) * resid0;
  }
  const double p_treated = weighted_mean(w, u);
  if (p_treated <= 0.0) throw DataError("aipw_ate: no treated units");
  const double est = weighted_mean(num, u) / p_treated;
  Eigen::VectorXd psi(n);
  for (long i = 0; i < n; ++i) psi[i] = (num[i] - w[i] * est) / p_treated;
  const double se = weighted_sd(psi, u) / std::sqrt(effective_n(u));
  return make_report(Estimand::Att, "aipw", est, se, n);
}

NuisanceEstimates cross_fit_nuisances(const Dataset& ds, int k_folds, std::uint64_t seed,
                                      ClipBounds clip) {
  const long n = ds.n();
  if (k_folds < 2) throw DataError("cross_fit_nuisances: need at least 2 folds");
  if (n < 2 * k_folds) throw DataError("cross_fit_nuisances: sample too small for K folds");
  if (ds.has_missing()) throw DataError("cross_fit_nuisances: impute missing values first");

  // Shuffled fold assignment, near-equal sizes.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::derive(seed, 0x666f6c64ULL);  // "fold"
  rng.shuffle(order);
  Eigen::VectorXi fold(n);
  for (long i = 0; i < n; ++i) {
    fold[order[static_cast<std::size_t>(i)]] = static_cast<int>(i % k_folds) + 1;
  }

  // Intercept + covariates, reduced once to an independent basis.
  Eigen::MatrixXd design(n, ds.p() + 1);
  design.col(0).setOnes();
  design.rightCols(ds.p()) = ds.covariates;
  const std::vector<int> kept = independent_columns(design);
  Eigen::MatrixXd x(n, static_cast<int>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) x.col(static_cast<int>(c)) = design.col(kept[c]);

  NuisanceEstimates nuis;
  nuis.clip = clip;
  nuis.e_hat.resize(n);
  nuis.mu0_hat.resize(n);
  nuis.mu1_hat.resize(n);
  nuis.m_hat.resize(n);
  nuis.fold_id = fold;

  for (int f = 1; f <= k_folds; ++f) {
    std::vector<long> train, test;
    for (long i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);

    auto subset = [&](const std::vector<long>& rows, const Eigen::VectorXd& v) {
      Eigen::VectorXd out(static_cast<long>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<long>(i)] = v[rows[i]];
      return out;
    };
    auto subset_x = [&](const std::vector<long>& rows) {
      Eigen::MatrixXd out(static_cast<long>(rows.size()), x.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<long>(i)) = x.row(rows[i]);
      return out;
    };

    const Eigen::MatrixXd x_train = subset_x(train);
    const Eigen::VectorXd w_train = subset(train, ds.treatment);
    const Eigen::VectorXd y_train = subset(train, ds.outcome);
    const Eigen::VectorXd u_train = subset(train, ds.weights);

    const LogisticFit prop = logistic_fit(x_train, w_train, u_train);
    const Eigen::MatrixXd x_test = subset_x(test);
    const Eigen::VectorXd e_test = predict_proba(prop, x_test);

    // Per-arm outcome surfaces on the training fold.
    auto arm_fit = [&](double arm) {
      std::vector<long> rows;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (ds.treatment[train[i]] == arm) rows.push_back(train[i]);
      }
      if (static_cast<long>(rows.size()) <= x.cols()) {
        throw DataError("cross_fit_nuisances: too few units in an arm within a training fold");
      }
      return ols_fit(subset_x(rows), subset(rows, ds.outcome), subset(rows, ds.weights),
                     RobustVariant::HC2);
    };
    const LinearFit fit0 = arm_fit(0.0);
    const LinearFit fit1 = arm_fit(1.0);

    Eigen::VectorXd x_mean = Eigen::VectorXd::Zero(x.cols());
    double u_sum = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const long row = test[i];
      const double e = std::clamp(e_test[static_cast<long>(i)], clip.lo, clip.hi);
      nuis.e_hat[row] = e;
      nuis.mu0_hat[row] = x.row(row).dot(fit0.coefficients);
      nuis.mu1_hat[row] = x.row(row).dot(fit1.coefficients);
      nuis.m_hat[row] = e * nuis.mu1_hat[row] + (1.0 - e) * nuis.mu0_hat[row];
      x_mean += ds.weights[row] * x.row(row).transpose();
      u_sum += ds.weights[row];
    }
    x_mean /= u_sum;

    // Coefficient-noise contribution of this fold's surface contrast. Fold
    // fits share most of their training data, so they are aggregated as
    // perfectly correlated (a conservative standard error).
    const double fold_var = x_mean.dot((fit0.covariance + fit1.covariance) * x_mean);
    nuis.model_var += (u_sum / ds.weights.sum()) * std::sqrt(std::max(fold_var, 0.0));
  }
  nuis.model_var *= nuis.model_var;
  return nuis;
}

}  // namespace causalkit
