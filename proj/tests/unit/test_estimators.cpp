#include <doctest.h>

#include <cmath>

#include "causalkit/errors.hpp"
#include "causalkit/estimators.hpp"
#include "causalkit/linear_models.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/synth.hpp"
#include "oracles.hpp"

using namespace causalkit;

namespace {

NuisanceEstimates oracle_nuisances(const Generated& g, ClipBounds clip = {}) {
  return NuisanceEstimates::from_marginals(
      g.truth.f_true + g.truth.e_true.cwiseProduct(g.truth.tau_true),
      g.truth.e_true, g.truth.tau_true, clip);
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("naive_diff: Y = W exactly gives estimate 1, se 0") {
  Dataset ds;
  const long n = 10;
  ds.covariates.setZero(n, 1);
  ds.covariates.col(0).setLinSpaced(n, 0, 1);
  ds.treatment.resize(n);
  ds.outcome.resize(n);
  ds.weights = Eigen::VectorXd::Ones(n);
  ds.missing_mask.setConstant(n, 1, false);
  ds.column_names = {"x1"};
  for (long i = 0; i < n; ++i) {
    ds.treatment[i] = i % 2;
    ds.outcome[i] = ds.treatment[i];
  }
  const EstimateReport r = naive_diff(ds);
  CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.ci_lo == doctest::Approx(r.estimate - 1.96 * r.se).epsilon(1e-12));
}

TEST_CASE("naive_diff recovers tau on a randomized DGP") {
  const Generated g = gen(preset("randomized-constant", 10000, 31));
  const EstimateReport r = naive_diff(g.data);
  CHECK(std::abs(r.estimate - 0.5) <= 3.0 * r.se);
}

TEST_CASE("naive_diff shows the planted confounding bias") {
  auto e = [](double x) {
    return std::min(0.98, std::max(0.02, 1.0 / (1.0 + std::exp(-x))));
  };
  const double e_mean = oracles::normal_expectation(e);
  const double xe = oracles::normal_expectation([&](double x) { return x * e(x); });
  const double planted_bias = xe / e_mean + xe / (1.0 - e_mean);

  const Generated g = gen(preset("confounded-linear", 20000, 32));
  const EstimateReport r = naive_diff(g.data);
  CHECK(std::abs(r.estimate - (0.5 + planted_bias)) <= 3.0 * r.se);
}

TEST_CASE("reg_ate: identical surfaces give zero") {
  const Generated g = gen(preset("randomized-constant", 500, 33));
  NuisanceEstimates nuis = oracle_nuisances(g);
  nuis.mu1_hat = nuis.mu0_hat;
  const EstimateReport r = reg_ate(g.data, nuis);
  CHECK(r.estimate == 0.0);
}

TEST_CASE("reg_ate with cross-fit linear nuisances is consistent on a linear DGP") {
  const Generated g = gen(preset("confounded-linear", 20000, 34));
  const NuisanceEstimates nuis = cross_fit_nuisances(g.data, 5, 77);
  const EstimateReport r = reg_ate(g.data, nuis);
  CHECK(std::abs(r.estimate - 0.5) < 0.05);
}

TEST_CASE("reg_ate equals the treatment-dummy coefficient for an interaction-free fit") {
  const Generated g = gen(preset("confounded-linear", 4000, 35));
  const long n = g.data.n();
  Eigen::MatrixXd x(n, g.data.p() + 2);
  x.col(0).setOnes();
  x.block(0, 1, n, g.data.p()) = g.data.covariates;
  x.col(g.data.p() + 1) = g.data.treatment;
  const LinearFit fit = ols_fit(x, g.data.outcome, g.data.weights, RobustVariant::HC2);
  const double dummy_coef = fit.coefficients[g.data.p() + 1];

  // Interaction-free surfaces: mu1 - mu0 is the dummy coefficient everywhere.
  NuisanceEstimates nuis;
  nuis.e_hat = Eigen::VectorXd::Constant(n, 0.5);
  Eigen::MatrixXd x0 = x, x1 = x;
  x0.col(g.data.p() + 1).setZero();
  x1.col(g.data.p() + 1).setOnes();
  nuis.mu0_hat = fit.predict(x0);
  nuis.mu1_hat = fit.predict(x1);
  nuis.m_hat = 0.5 * (nuis.mu0_hat + nuis.mu1_hat);
  nuis.fold_id = Eigen::VectorXi::Zero(n);

  const EstimateReport r = reg_ate(g.data, nuis);
  CHECK(r.estimate == doctest::Approx(dummy_coef).epsilon(1e-8));
}

TEST_CASE("ipw_ate equals naive_diff exactly under constant propensity (Hajek)") {
  const Generated g = gen(preset("randomized-constant", 3000, 36));
  NuisanceEstimates nuis = oracle_nuisances(g);
  const EstimateReport ipw = ipw_ate(g.data, nuis, IpwNormalization::Hajek);
  const EstimateReport naive = naive_diff(g.data);
  CHECK(ipw.estimate == doctest::Approx(naive.estimate).epsilon(1e-12));
}

TEST_CASE("ipw_ate with the true propensity removes confounding") {
  const Generated g = gen(preset("confounded-linear", 20000, 37));
  const NuisanceEstimates nuis = oracle_nuisances(g);
  const EstimateReport r = ipw_ate(g.data, nuis);
  CHECK(std::abs(r.estimate - 0.5) < 0.05);
}

TEST_CASE("ipw_ate rejects propensities outside (0,1)") {
  const Generated g = gen(preset("randomized-constant", 100, 38));
  NuisanceEstimates nuis = oracle_nuisances(g);
  nuis.e_hat[3] = 1.0;
  CHECK_THROWS_AS(ipw_ate(g.data, nuis), DataError);
}

TEST_CASE("an extreme propensity inflates the IPW standard error at least 5x") {
  Generated g = gen(preset("randomized-constant", 2000, 39));
  NuisanceEstimates raw = oracle_nuisances(g, ClipBounds{1e-4, 1.0 - 1e-4});
  // One treated unit claims a propensity of 1/1000 and a big outcome.
  long victim = -1;
  for (long i = 0; i < g.data.n(); ++i) {
    if (g.data.treatment[i] == 1.0) { victim = i; break; }
  }
  g.data.outcome[victim] += 8.0;
  raw.e_hat[victim] = 0.001;

  NuisanceEstimates clipped = raw;
  clipped.clip = ClipBounds{0.01, 0.99};
  clipped.e_hat = clipped.e_hat.cwiseMax(0.01).cwiseMin(0.99);

  const EstimateReport loose = ipw_ate(g.data, raw, IpwNormalization::HorvitzThompson);
  const EstimateReport tight = ipw_ate(g.data, clipped, IpwNormalization::HorvitzThompson);
  CHECK(loose.se >= 5.0 * tight.se);
}

TEST_CASE("aipw_ate: perfect nuisances on a noiseless DGP give exact tau, se 0") {
  SyntheticDGP dgp = preset("confounded-linear", 1500, 40);
  dgp.noise_sd = 0.0;
  const Generated g = gen(dgp);
  const NuisanceEstimates nuis = oracle_nuisances(g);
  const EstimateReport r = aipw_ate(g.data, nuis);
  CHECK(r.estimate == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.se == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("aipw double robustness: wrong outcome model, correct propensity") {
  double bias_acc = 0.0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    const Generated g = gen(preset("wrong-outcome-model", 20000, 50 + rep));
    NuisanceEstimates nuis = oracle_nuisances(g);
    // Break the outcome surfaces, keep the truth propensity.
    nuis.mu0_hat.setZero();
    nuis.mu1_hat.setZero();
    nuis.m_hat = nuis.e_hat;  // wrong but harmless placeholder for m
    const EstimateReport r = aipw_ate(g.data, nuis);
    bias_acc += r.estimate - 0.5;
  }
  CHECK(std::abs(bias_acc / reps) < 0.05);
}

TEST_CASE("aipw double robustness: correct outcome model, wrong propensity") {
  double bias_acc = 0.0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    const Generated g = gen(preset("wrong-propensity-model", 20000, 60 + rep));
    NuisanceEstimates nuis = oracle_nuisances(g);
    nuis.e_hat.setConstant(0.35);  // wrong constant propensity
    const EstimateReport r = aipw_ate(g.data, nuis);
    bias_acc += r.estimate - 0.5;
  }
  CHECK(std::abs(bias_acc / reps) < 0.05);
}

TEST_CASE("aipw_scores: residual-free units score exactly tau") {
  SyntheticDGP dgp = preset("randomized-constant", 300, 41);
  dgp.noise_sd = 0.0;
  const Generated g = gen(dgp);
  const NuisanceEstimates nuis = oracle_nuisances(g);
  const Eigen::VectorXd scores = aipw_scores(g.data, nuis, g.truth.tau_true);
  CHECK((scores - g.truth.tau_true).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mean of aipw_scores equals aipw_ate(all) definitionally") {
  const Generated g = gen(preset("confounded-linear", 5000, 42));
  const NuisanceEstimates nuis = cross_fit_nuisances(g.data, 5, 7);
  const Eigen::VectorXd tau = nuis.mu1_hat - nuis.mu0_hat;
  const NuisanceEstimates from_tau =
      NuisanceEstimates::from_marginals(nuis.m_hat, nuis.e_hat, tau, nuis.clip);
  const Eigen::VectorXd scores = aipw_scores(g.data, from_tau, tau);
  const EstimateReport r = aipw_ate(g.data, from_tau);
  CHECK(scores.mean() == doctest::Approx(r.estimate).epsilon(1e-12));
}

TEST_CASE("aipw_scores quintile ranking recovers per-quintile effect means") {
  const Generated g = gen(preset("heterogeneous-monotone", 20000, 43));
  const NuisanceEstimates nuis = oracle_nuisances(g);
  const Eigen::VectorXd scores = aipw_scores(g.data, nuis, g.truth.tau_true);

  // Rank by true tau; per-quintile mean of scores ~ per-quintile mean of tau.
  std::vector<long> idx(static_cast<std::size_t>(g.data.n()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](long a, long b) { return g.truth.tau_true[a] < g.truth.tau_true[b]; });
  const long per = g.data.n() / 5;
  for (int q = 0; q < 5; ++q) {
    double score_mean = 0.0, tau_mean = 0.0, score_var = 0.0;
    for (long k = q * per; k < (q + 1) * per; ++k) {
      score_mean += scores[idx[static_cast<std::size_t>(k)]];
      tau_mean += g.truth.tau_true[idx[static_cast<std::size_t>(k)]];
    }
    score_mean /= per;
    tau_mean /= per;
    for (long k = q * per; k < (q + 1) * per; ++k) {
      const double d = scores[idx[static_cast<std::size_t>(k)]] - score_mean;
      score_var += d * d;
    }
    const double se = std::sqrt(score_var / (per - 1) / per);
    CHECK(std::abs(score_mean - tau_mean) <= 3.0 * se);
  }
}

TEST_CASE("location invariance: shifting outcomes moves no ATE estimator") {
  const Generated g = gen(preset("confounded-linear", 4000, 44));
  const NuisanceEstimates nuis = oracle_nuisances(g);

  Generated shifted = g;
  shifted.data.outcome.array() += 13.5;
  NuisanceEstimates shifted_nuis = nuis;
  shifted_nuis.mu0_hat.array() += 13.5;
  shifted_nuis.mu1_hat.array() += 13.5;
  shifted_nuis.m_hat.array() += 13.5;

  CHECK(std::abs(naive_diff(shifted.data).estimate - naive_diff(g.data).estimate) < 1e-10);
  CHECK(std::abs(reg_ate(shifted.data, shifted_nuis).estimate -
                 reg_ate(g.data, nuis).estimate) < 1e-10);
  CHECK(std::abs(aipw_ate(shifted.data, shifted_nuis).estimate -
                 aipw_ate(g.data, nuis).estimate) < 1e-10);
  // Hajek normalization makes IPW location-invariant as well.
  CHECK(std::abs(ipw_ate(shifted.data, nuis).estimate - ipw_ate(g.data, nuis).estimate -
                 0.0) < 1e-10);
}

TEST_CASE("aipw reduces to reg / ipw in the degenerate cases") {
  const Generated g = gen(preset("confounded-linear", 3000, 45));
  SUBCASE("zero residuals: aipw == reg") {
    NuisanceEstimates nuis = oracle_nuisances(g);
    // Make the surfaces interpolate the observations exactly.
    for (long i = 0; i < g.data.n(); ++i) {
      if (g.data.treatment[i] == 1.0) {
        nuis.mu1_hat[i] = g.data.outcome[i];
      } else {
        nuis.mu0_hat[i] = g.data.outcome[i];
      }
    }
    const double aipw = aipw_ate(g.data, nuis).estimate;
    const double reg = reg_ate(g.data, nuis).estimate;
    CHECK(aipw == doctest::Approx(reg).epsilon(1e-12));
  }
  SUBCASE("zero surfaces: aipw == ipw (Horvitz-Thompson)") {
    NuisanceEstimates nuis = oracle_nuisances(g);
    nuis.mu0_hat.setZero();
    nuis.mu1_hat.setZero();
    const double aipw = aipw_ate(g.data, nuis).estimate;
    const double ipw = ipw_ate(g.data, nuis, IpwNormalization::HorvitzThompson).estimate;
    CHECK(aipw == doctest::Approx(ipw).epsilon(1e-10));
  }
}

TEST_CASE("ATT weighting: aipw target=treated matches a direct oracle") {
  // Selection on gains: tau lower among the treated.
  SyntheticDGP dgp = preset("confounded-linear", 60000, 46);
  Eigen::VectorXd tc = Eigen::VectorXd::Zero(3);
  tc[0] = -0.5;
  dgp.effect = FunctionSpec::linear(tc);  // tau(x) = -0.5 x1, e increasing in x1
  const Generated g = gen(dgp);
  const NuisanceEstimates nuis = oracle_nuisances(g);
  const EstimateReport att = aipw_ate(g.data, nuis, AteTarget::Treated);
  CHECK(std::abs(att.estimate - g.truth.att_true) <= 3.0 * att.se);
  CHECK(g.truth.att_true < g.truth.ate_true);
  const EstimateReport ate = aipw_ate(g.data, nuis, AteTarget::All);
  CHECK(att.estimate < ate.estimate);
}

TEST_CASE("cross_fit_nuisances covers folds 1..K and clips propensities") {
  const Generated g = gen(preset("confounded-linear", 1000, 47));
  const NuisanceEstimates nuis = cross_fit_nuisances(g.data, 5, 3);
  CHECK(nuis.fold_id.minCoeff() == 1);
  CHECK(nuis.fold_id.maxCoeff() == 5);
  CHECK(nuis.e_hat.minCoeff() >= nuis.clip.lo);
  CHECK(nuis.e_hat.maxCoeff() <= nuis.clip.hi);
  nuis.validate(g.data.n());
}

TEST_CASE("reports reconstruct the 95% CI from estimate and se") {
  const Generated g = gen(preset("randomized-constant", 1000, 48));
  for (const EstimateReport& r :
       {naive_diff(g.data), aipw_ate(g.data, oracle_nuisances(g))}) {
    CHECK(r.ci_lo == doctest::Approx(r.estimate - 1.96 * r.se).epsilon(1e-12));
    CHECK(r.ci_hi == doctest::Approx(r.estimate + 1.96 * r.se).epsilon(1e-12));
    CHECK(r.ci_lo < r.ci_hi);
  }
}

}  // TEST_SUITE
