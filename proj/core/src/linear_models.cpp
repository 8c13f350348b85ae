#include "causalkit/linear_models.hpp"

#include <algorithm>
#include <cmath>

#include "causalkit/errors.hpp"

namespace causalkit {

std::string to_string(RobustVariant v) {
  switch (v) {
    case RobustVariant::HC0: return "HC0";
    case RobustVariant::HC2: return "HC2";
    case RobustVariant::HC3: return "HC3";
  }
  return "?";
}

Eigen::VectorXd LinearFit::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != coefficients.size()) throw DataError("LinearFit::predict: column mismatch");
  return x * coefficients;
}

LinearFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& w, RobustVariant variant,
                  const std::vector<std::string>& column_names) {
  const long n = x.rows();
  const int p = static_cast<int>(x.cols());
  if (y.size() != n || w.size() != n) throw DataError("ols_fit: length mismatch");
  if (n <= p) throw DataError("ols_fit: need n > p");
  if ((w.array() <= 0.0).any()) throw DataError("ols_fit: weights must be positive");

  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd xs = sw.asDiagonal() * x;
  const Eigen::VectorXd ys = sw.cwiseProduct(y);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(1e-10);
  if (static_cast<int>(qr.rank()) < p) {
    // The first pivoted-out column is the one expressible from the others.
    const int offender = qr.colsPermutation().indices()[qr.rank()];
    std::string name = offender < static_cast<int>(column_names.size())
                           ? column_names[static_cast<std::size_t>(offender)]
                           : "column " + std::to_string(offender);
    throw NumericError("ols_fit: singular design; " + name +
                       " is linearly dependent on the other columns");
  }

  LinearFit fit;
  fit.variant = variant;
  fit.n_obs = n;
  fit.coefficients = qr.solve(ys);
  fit.residuals = y - x * fit.coefficients;

  // Leverage of the weighted hat matrix via the thin Q factor.
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  fit.leverage = q.rowwise().squaredNorm();

  Eigen::VectorXd meat_scale(n);
  for (long i = 0; i < n; ++i) {
    const double e2 = fit.residuals[i] * fit.residuals[i];
    const double h = std::min(fit.leverage[i], 1.0 - 1e-12);
    switch (variant) {
      case RobustVariant::HC0: meat_scale[i] = e2; break;
      case RobustVariant::HC2: meat_scale[i] = e2 / (1.0 - h); break;
      case RobustVariant::HC3: meat_scale[i] = e2 / ((1.0 - h) * (1.0 - h)); break;
    }
  }

  // (X'WX)^-1 [sum w_i^2 a_i x_i x_i'] (X'WX)^-1
  const Eigen::MatrixXd xtwx = xs.transpose() * xs;
  const Eigen::MatrixXd bread = xtwx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose() * w[i];
    meat.noalias() += meat_scale[i] * (xi * xi.transpose());
  }
  fit.covariance = bread * meat * bread;
  // Symmetrize away round-off.
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());
  return fit;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double weighted_ll(const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& w) {
  double ll = 0.0;
  for (long i = 0; i < eta.size(); ++i) {
    const double p = std::clamp(sigmoid(eta[i]), 1e-12, 1.0 - 1e-12);
    ll += w[i] * (y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
  }
  return ll;
}

}  // namespace

LogisticFit logistic_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                         const Eigen::VectorXd& w) {
  const long n = x.rows();
  const int p = static_cast<int>(x.cols());
  if (y01.size() != n || w.size() != n) throw DataError("logistic_fit: length mismatch");
  bool has0 = false, has1 = false;
  for (long i = 0; i < n; ++i) {
    if (y01[i] == 0.0) has0 = true;
    else if (y01[i] == 1.0) has1 = true;
    else throw DataError("logistic_fit: responses must be 0/1");
  }
  if (!has0 || !has1) throw DataError("logistic_fit: both classes must be present");

  constexpr int kMaxIter = 100;
  constexpr double kGradTol = 1e-8;
  constexpr double kEtaDivergence = 36.0;  // sigmoid saturates in double beyond this

  LogisticFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double ll = weighted_ll(eta, y01, w);
  fit.ll_trace.push_back(ll);

  for (int iter = 0; iter < kMaxIter; ++iter) {
    fit.iterations = iter + 1;
    Eigen::VectorXd prob(n), irls_w(n);
    for (long i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      irls_w[i] = std::max(w[i] * prob[i] * (1.0 - prob[i]), 1e-12);
    }
    const Eigen::VectorXd grad = x.transpose() * (w.cwiseProduct(y01 - prob));
    if (grad.cwiseAbs().maxCoeff() < kGradTol) {
      fit.converged = true;
      return fit;
    }

    const Eigen::MatrixXd h = x.transpose() * irls_w.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success) break;
    Eigen::VectorXd step = ldlt.solve(grad);

    // Step halving keeps the weighted log-likelihood non-decreasing.
    double scale = 1.0;
    Eigen::VectorXd beta_next, eta_next;
    double ll_next = -std::numeric_limits<double>::infinity();
    for (int half = 0; half < 30; ++half) {
      beta_next = fit.coefficients + scale * step;
      eta_next = x * beta_next;
      ll_next = weighted_ll(eta_next, y01, w);
      if (ll_next >= ll) break;
      scale *= 0.5;
    }
    if (ll_next < ll) break;  // no ascent direction left
    fit.coefficients = beta_next;
    eta = eta_next;
    ll = ll_next;
    fit.ll_trace.push_back(ll);

    if (eta.cwiseAbs().maxCoeff() > kEtaDivergence) break;  // separation: norms diverge
  }

  fit.converged = false;
  return fit;
}

std::vector<int> independent_columns(const Eigen::MatrixXd& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> kept;
  kept.reserve(static_cast<std::size_t>(rank));
  for (int i = 0; i < rank; ++i) kept.push_back(qr.colsPermutation().indices()[i]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

Eigen::VectorXd predict_proba(const LogisticFit& fit, const Eigen::MatrixXd& x) {
  if (x.cols() != fit.coefficients.size()) {
    throw DataError("predict_proba: column count does not match the fit");
  }
  const double clamp_lo = fit.converged ? 1e-15 : 1e-6;
  Eigen::VectorXd out(x.rows());
  const Eigen::VectorXd eta = x * fit.coefficients;
  for (long i = 0; i < x.rows(); ++i) {
    out[i] = std::clamp(sigmoid(eta[i]), clamp_lo, 1.0 - clamp_lo);
  }
  return out;
}

}  // namespace causalkit
