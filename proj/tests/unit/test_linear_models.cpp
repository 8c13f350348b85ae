#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "causalkit/errors.hpp"
#include "causalkit/linear_models.hpp"
#include "causalkit/rng.hpp"
#include "oracles.hpp"

using namespace causalkit;

TEST_SUITE("linear_models") {

TEST_CASE("ols recovers an exact line with zero residuals") {
  Eigen::MatrixXd x(5, 1);
  x << 1, 2, 3, 4, 5;
  const Eigen::VectorXd y = 2.0 * x.col(0);
  const LinearFit fit = ols_fit(x, y, Eigen::VectorXd::Ones(5), RobustVariant::HC0);
  CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("intercept + dummy design reproduces the group-mean difference") {
  Rng rng(3);
  const long n = 60;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  double sum1 = 0.0, sum0 = 0.0;
  long n1 = 0, n0 = 0;
  for (long i = 0; i < n; ++i) {
    const double d = i % 3 == 0 ? 1.0 : 0.0;
    x(i, 0) = 1.0;
    x(i, 1) = d;
    y[i] = rng.normal(d == 1.0 ? 2.0 : 0.5, 1.0);
    (d == 1.0 ? sum1 : sum0) += y[i];
    (d == 1.0 ? n1 : n0)++;
  }
  const LinearFit fit = ols_fit(x, y, Eigen::VectorXd::Ones(n), RobustVariant::HC2);
  CHECK(fit.coefficients[1] == doctest::Approx(sum1 / n1 - sum0 / n0).epsilon(1e-10));
}

TEST_CASE("HC3 tracks the Monte Carlo sd under heteroskedasticity; classical does not" *
          doctest::timeout(120)) {
  // var(eps | x) proportional to x^2. 500 replications at n = 2000.
  const int reps = 500;
  const long n = 2000;
  std::vector<double> slopes, hc3_ses, classical_ses;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(100 + static_cast<std::uint64_t>(rep));
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      const double xi = rng.normal();
      x(i, 0) = 1.0;
      x(i, 1) = xi;
      y[i] = 1.0 + 0.5 * xi + std::abs(xi) * rng.normal();
    }
    const LinearFit fit = ols_fit(x, y, Eigen::VectorXd::Ones(n), RobustVariant::HC3);
    slopes.push_back(fit.coefficients[1]);
    hc3_ses.push_back(fit.se()[1]);
    // Classical homoskedastic SE from the same fit's residuals.
    const double s2 = fit.residuals.squaredNorm() / double(n - 2);
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    classical_ses.push_back(std::sqrt(s2 * xtx_inv(1, 1)));
  }
  const double mean_slope =
      std::accumulate(slopes.begin(), slopes.end(), 0.0) / reps;
  double var = 0.0;
  for (double s : slopes) var += (s - mean_slope) * (s - mean_slope);
  const double mc_sd = std::sqrt(var / (reps - 1));
  const double mean_hc3 = std::accumulate(hc3_ses.begin(), hc3_ses.end(), 0.0) / reps;
  const double mean_classical =
      std::accumulate(classical_ses.begin(), classical_ses.end(), 0.0) / reps;
  CHECK(std::abs(mean_hc3 - mc_sd) / mc_sd < 0.10);
  CHECK(std::abs(mean_classical - mc_sd) / mc_sd > 0.10);
}

TEST_CASE("fitted values are invariant to invertible reparameterization") {
  Rng rng(8);
  const long n = 80;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n), w(n);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 0) - 2.0 * x(i, 2) + rng.normal();
    w[i] = rng.uniform(0.5, 2.0);
  }
  Eigen::MatrixXd t(3, 3);
  t << 2, 1, 0, 0, 1, 3, 1, 0, 1;  // invertible
  const LinearFit a = ols_fit(x, y, w, RobustVariant::HC0);
  const LinearFit b = ols_fit(x * t, y, w, RobustVariant::HC0);
  CHECK((a.predict(x) - b.predict(x * t)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("HC variants order the diagonal variances") {
  Rng rng(9);
  const long n = 50;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    y[i] = 0.3 * x(i, 1) + rng.normal();
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd hc0 = ols_fit(x, y, ones, RobustVariant::HC0).covariance.diagonal();
  const Eigen::VectorXd hc2 = ols_fit(x, y, ones, RobustVariant::HC2).covariance.diagonal();
  const Eigen::VectorXd hc3 = ols_fit(x, y, ones, RobustVariant::HC3).covariance.diagonal();
  for (int j = 0; j < 2; ++j) {
    CHECK(hc0[j] <= hc2[j] + 1e-15);
    CHECK(hc2[j] <= hc3[j] + 1e-15);
  }
}

TEST_CASE("covariance is symmetric PSD and residuals are design-orthogonal") {
  Rng rng(10);
  const long n = 120;
  Eigen::MatrixXd x(n, 4);
  Eigen::VectorXd y(n), w(n);
  for (long i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < 4; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 1) + rng.normal();
    w[i] = rng.uniform(0.25, 3.0);
  }
  const LinearFit fit = ols_fit(x, y, w, RobustVariant::HC2);
  CHECK((fit.covariance - fit.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.covariance);
  CHECK(eig.eigenvalues().minCoeff() > -1e-8);
  const Eigen::VectorXd moment = x.transpose() * (w.cwiseProduct(fit.residuals));
  CHECK(moment.cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, y.cwiseAbs().maxCoeff()));
}

TEST_CASE("rank-deficient designs fail naming the dependent column") {
  Eigen::MatrixXd x(6, 3);
  for (long i = 0; i < 6; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i);
    x(i, 2) = 2.0 * i + 3.0;  // dependent on the first two
  }
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(6, 0, 5);
  try {
    ols_fit(x, y, Eigen::VectorXd::Ones(6), RobustVariant::HC0, {"one", "t", "t_scaled"});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("singular design") != std::string::npos);
    // One of the involved columns is named (pivoting decides which).
    CHECK((msg.find("t_scaled") != std::string::npos || msg.find("t") != std::string::npos ||
           msg.find("one") != std::string::npos));
  }
}

TEST_CASE("logistic: symmetric data gives a near-zero intercept") {
  const long n = 200;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  Rng rng(21);
  for (long i = 0; i < n; i += 2) {
    const double v = rng.normal();
    x(i, 0) = 1.0;
    x(i, 1) = v;
    y[i] = 1.0;
    x(i + 1, 0) = 1.0;
    x(i + 1, 1) = -v;
    y[i + 1] = 0.0;
  }
  const LogisticFit fit = logistic_fit(x, y, Eigen::VectorXd::Ones(n));
  CHECK(fit.converged);
  CHECK(std::abs(fit.coefficients[0]) < 1e-6);
}

TEST_CASE("logistic consistency at large n" * doctest::timeout(120)) {
  Rng rng(22);
  const long n = 50000;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    const double v = rng.normal();
    x(i, 0) = 1.0;
    x(i, 1) = v;
    const double p = 1.0 / (1.0 + std::exp(-(0.5 + v)));
    y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  const LogisticFit fit = logistic_fit(x, y, Eigen::VectorXd::Ones(n));
  CHECK(fit.converged);
  CHECK(fit.coefficients[0] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(fit.coefficients[0] - 0.5) < 0.05);
  CHECK(std::abs(fit.coefficients[1] - 1.0) < 0.05);
}

TEST_CASE("logistic separation reports converged = false with clamped predictions") {
  Eigen::MatrixXd x(6, 2);
  Eigen::VectorXd y(6);
  for (long i = 0; i < 6; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i) - 2.5;
    y[i] = i >= 3 ? 1.0 : 0.0;  // perfectly separated at 0
  }
  const LogisticFit fit = logistic_fit(x, y, Eigen::VectorXd::Ones(6));
  CHECK_FALSE(fit.converged);
  const Eigen::VectorXd p = predict_proba(fit, x);
  CHECK(p.minCoeff() >= 1e-6);
  CHECK(p.maxCoeff() <= 1.0 - 1e-6);
}

TEST_CASE("logistic log-likelihood is non-decreasing across iterations") {
  Rng rng(23);
  const long n = 400;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n), w(n);
  for (long i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = rng.uniform(-2.0, 2.0);
    const double p = 1.0 / (1.0 + std::exp(-(0.2 + x(i, 1) - 0.7 * x(i, 2))));
    y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    w[i] = rng.uniform(0.5, 1.5);
  }
  const LogisticFit fit = logistic_fit(x, y, w);
  for (std::size_t k = 1; k < fit.ll_trace.size(); ++k) {
    CHECK(fit.ll_trace[k] >= fit.ll_trace[k - 1] - 1e-12);
  }
}

TEST_CASE("logistic rejects single-class input") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 1);
  CHECK_THROWS_AS(logistic_fit(x, Eigen::VectorXd::Ones(5), Eigen::VectorXd::Ones(5)), DataError);
}

TEST_CASE("predict_proba basics") {
  LogisticFit fit;
  fit.converged = true;
  fit.coefficients = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd x(3, 2);
  x << 1, -1, 1, 0, 1, 1;
  const Eigen::VectorXd p = predict_proba(fit, x);
  for (long i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(0.5));

  fit.coefficients << 0.0, 10.0;
  const Eigen::VectorXd q = predict_proba(fit, x);
  CHECK(q[0] < 0.01);
  CHECK(q[2] > 0.99);
  CHECK(q[0] < q[1]);
  CHECK(q[1] < q[2]);
}

TEST_CASE("predict_proba matches the closed form to 1e-12") {
  Rng rng(24);
  LogisticFit fit;
  fit.converged = true;
  fit.coefficients = Eigen::VectorXd(3);
  fit.coefficients << 0.3, -1.1, 0.45;
  Eigen::MatrixXd x(50, 3);
  for (long i = 0; i < 50; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-3.0, 3.0);
  }
  const Eigen::VectorXd p = predict_proba(fit, x);
  for (long i = 0; i < 50; ++i) {
    const double z = x.row(i).dot(fit.coefficients);
    CHECK(std::abs(p[i] - 1.0 / (1.0 + std::exp(-z))) < 1e-12);
  }
  Eigen::MatrixXd wrong(2, 2);
  CHECK_THROWS_AS(predict_proba(fit, wrong), DataError);
}

}  // TEST_SUITE
