#include "causalkit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

constexpr double kOverlapLo = 0.02;
constexpr double kOverlapHi = 0.98;

}  // namespace

double FunctionSpec::operator()(const Eigen::VectorXd& x) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Linear:
      return a + coefs.head(std::min(coefs.size(), x.size()))
                     .dot(x.head(std::min(coefs.size(), x.size())));
    case Kind::QuadraticX1: return a * x[0] * x[0];
    case Kind::LogisticX1: return sigmoid(a + b * x[0]);
    case Kind::StepX1: return a + (x[0] > 0.0 ? b : 0.0);
  }
  return 0.0;
}

FunctionSpec FunctionSpec::constant(double value) {
  FunctionSpec f;
  f.kind = Kind::Constant;
  f.a = value;
  return f;
}

FunctionSpec FunctionSpec::linear(Eigen::VectorXd coefs, double intercept) {
  FunctionSpec f;
  f.kind = Kind::Linear;
  f.a = intercept;
  f.coefs = std::move(coefs);
  return f;
}

FunctionSpec FunctionSpec::quadratic_x1(double scale) {
  FunctionSpec f;
  f.kind = Kind::QuadraticX1;
  f.a = scale;
  return f;
}

FunctionSpec FunctionSpec::logistic_x1(double intercept, double slope) {
  FunctionSpec f;
  f.kind = Kind::LogisticX1;
  f.a = intercept;
  f.b = slope;
  return f;
}

FunctionSpec FunctionSpec::step_x1(double base, double height) {
  FunctionSpec f;
  f.kind = Kind::StepX1;
  f.a = base;
  f.b = height;
  return f;
}

namespace {

void apply_mcar(Dataset& ds, double rate, Rng& rng) {
  if (rate <= 0.0) return;
  std::vector<int> group_of(static_cast<std::size_t>(ds.p()), -1);
  for (std::size_t g = 0; g < ds.onehot_groups.size(); ++g) {
    for (int j = ds.onehot_groups[g].first; j <= ds.onehot_groups[g].second; ++j) {
      group_of[static_cast<std::size_t>(j)] = static_cast<int>(g);
    }
  }
  for (long i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.p(); ++j) {
      const int g = group_of[static_cast<std::size_t>(j)];
      if (g >= 0 && j != ds.onehot_groups[static_cast<std::size_t>(g)].first) continue;
      if (!rng.bernoulli(rate)) continue;
      if (g >= 0) {
        const auto [first, last] = ds.onehot_groups[static_cast<std::size_t>(g)];
        for (int k = first; k <= last; ++k) {
          ds.missing_mask(i, k) = true;
          ds.covariates(i, k) = std::numeric_limits<double>::quiet_NaN();
        }
      } else {
        ds.missing_mask(i, j) = true;
        ds.covariates(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
}

Truth finalize_truth(Truth truth, const Eigen::VectorXd& w) {
  truth.ate_true = truth.tau_true.mean();
  const double n1 = w.sum();
  truth.att_true = n1 > 0.0 ? truth.tau_true.dot(w) / n1 : 0.0;
  return truth;
}

}  // namespace

Generated gen(const SyntheticDGP& dgp) {
  if (dgp.n < 1 || dgp.p < 1) throw DataError("gen: need n >= 1 and p >= 1");
  Rng rng = Rng::derive(dgp.seed, 0x67656eULL);  // "gen"

  Generated out;
  Dataset& ds = out.data;
  ds.covariates.resize(dgp.n, dgp.p);
  ds.treatment.resize(dgp.n);
  ds.outcome.resize(dgp.n);
  ds.weights = Eigen::VectorXd::Ones(dgp.n);
  ds.missing_mask.setConstant(dgp.n, dgp.p, false);
  for (int j = 0; j < dgp.p; ++j) ds.column_names.push_back("x" + std::to_string(j + 1));

  Truth& truth = out.truth;
  truth.tau_true.resize(dgp.n);
  truth.f_true.resize(dgp.n);
  truth.e_true.resize(dgp.n);
  truth.eps.resize(dgp.n);

  for (long i = 0; i < dgp.n; ++i) {
    for (int j = 0; j < dgp.p; ++j) {
      switch (dgp.law) {
        case CovariateLaw::StandardNormal: ds.covariates(i, j) = rng.normal(); break;
        case CovariateLaw::Uniform2: ds.covariates(i, j) = rng.uniform(-2.0, 2.0); break;
        case CovariateLaw::Uniform1: ds.covariates(i, j) = rng.uniform(-1.0, 1.0); break;
      }
    }
    const Eigen::VectorXd x = ds.covariates.row(i);
    const double e = std::clamp(dgp.propensity(x), kOverlapLo, kOverlapHi);
    truth.e_true[i] = e;
    ds.treatment[i] = rng.bernoulli(e) ? 1.0 : 0.0;
    truth.f_true[i] = dgp.baseline(x);
    truth.tau_true[i] = dgp.effect(x);
    truth.eps[i] = rng.normal(0.0, dgp.noise_sd);
    ds.outcome[i] = truth.f_true[i] + ds.treatment[i] * truth.tau_true[i] + truth.eps[i];
  }

  apply_mcar(ds, dgp.mcar_rate, rng);
  out.truth = finalize_truth(std::move(truth), ds.treatment);
  out.schema.treatment = "w";
  out.schema.outcome = "y";
  return out;
}

std::vector<std::string> preset_names() {
  return {"randomized-constant", "confounded-linear", "wrong-outcome-model",
          "wrong-propensity-model", "heterogeneous-monotone"};
}

SyntheticDGP preset(const std::string& name, long n, std::uint64_t seed) {
  SyntheticDGP dgp;
  dgp.n = n;
  dgp.seed = seed;
  auto e_basis = [](int p, double v0) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
    c[0] = v0;
    return c;
  };
  if (name == "randomized-constant") {
    dgp.p = 3;
    dgp.baseline = FunctionSpec::linear(e_basis(3, 1.0));
    dgp.propensity = FunctionSpec::constant(0.5);
    dgp.effect = FunctionSpec::constant(0.5);
    dgp.noise_sd = 1.0;
  } else if (name == "confounded-linear") {
    dgp.p = 3;
    dgp.baseline = FunctionSpec::linear(e_basis(3, 1.0));
    dgp.propensity = FunctionSpec::logistic_x1(0.0, 1.0);
    dgp.effect = FunctionSpec::constant(0.5);
    dgp.noise_sd = 1.0;
  } else if (name == "wrong-outcome-model") {
    dgp.p = 3;
    dgp.law = CovariateLaw::Uniform2;
    dgp.baseline = FunctionSpec::quadratic_x1(2.0);
    dgp.propensity = FunctionSpec::logistic_x1(0.4, 0.8);
    dgp.effect = FunctionSpec::constant(0.5);
    dgp.noise_sd = 0.5;
  } else if (name == "wrong-propensity-model") {
    dgp.p = 3;
    dgp.law = CovariateLaw::Uniform2;
    dgp.baseline = FunctionSpec::linear(e_basis(3, 2.0));
    dgp.propensity = FunctionSpec::step_x1(0.2, 0.5);
    dgp.effect = FunctionSpec::constant(0.5);
    dgp.noise_sd = 1.0;
  } else if (name == "heterogeneous-monotone") {
    dgp.p = 10;
    dgp.law = CovariateLaw::Uniform1;
    Eigen::VectorXd fc = Eigen::VectorXd::Zero(10);
    fc[1] = 0.5;
    dgp.baseline = FunctionSpec::linear(fc);
    dgp.propensity = FunctionSpec::constant(0.5);
    dgp.effect = FunctionSpec::linear(e_basis(10, 1.0));
    dgp.noise_sd = 0.5;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return dgp;
}

namespace {

// Frozen survey-like marginals. Ordinal probability tables are calibrated to
// published means and standard deviations; the age distribution is a normal
// truncated to [20, 80] whose post-truncation moments are (52.973, 16.161).
constexpr double kAgeMu = 61.348645;
constexpr double kAgeSigma = 31.764701;
constexpr double kMaleRate = 0.456;
constexpr double kPrivateSchoolRate = 0.045;
const std::array<double, 4> kSiblingPmf = {0.0841, 0.2645, 0.3868, 0.2646};
const std::array<double, 5> kScorePmf = {0.0549, 0.1984, 0.3445, 0.2872, 0.1150};
const std::array<double, 5> kEduPmf = {0.0723, 0.2410, 0.3632, 0.2474, 0.0761};
const std::array<double, 8> kJobPmf = {0.0525, 0.0924, 0.1374, 0.1724,
                                       0.1824, 0.1627, 0.1224, 0.0777};
constexpr double kScoreMean = 3.209, kScoreSd = 1.059;
constexpr double kEduMean = 3.014, kEduSd = 1.040;
constexpr double kSibMean = 1.832, kSibSd = 0.915;

// Propensity: prefecture base rate on the logit scale plus individual tilts;
// the global shift keeps the marginal treatment share at 0.097.
constexpr double kPropShift = -0.097352;
constexpr double kPropInc = 0.25;
constexpr double kPropSchool = 0.55;
constexpr double kPropScore = 0.15;

// Outcome baseline: standardized-covariate loadings plus an intercept that
// centers E[Y] at zero under the default planted effect.
constexpr double kFIntercept = -0.018;
constexpr double kFInc = 0.30;
constexpr double kFEdu = 0.40;
constexpr double kFScore = 0.45;
constexpr double kFSib = -0.20;
constexpr double kFMale = 0.05;
constexpr double kNoiseSd = 0.9;

struct PrefectureTable {
  std::array<double, 47> share_cum{};
  std::array<double, 47> base_rate{};
};

PrefectureTable prefecture_table() {
  PrefectureTable t;
  std::array<double, 47> share{};
  share.fill(std::numeric_limits<double>::quiet_NaN());
  const std::pair<int, double> big[] = {{13, 0.105}, {14, 0.072}, {27, 0.070}, {23, 0.059},
                                        {11, 0.058}, {12, 0.049}, {28, 0.043}, {1, 0.042},
                                        {40, 0.040}, {22, 0.029}, {8, 0.023}, {34, 0.022}};
  double assigned = 0.0;
  int n_assigned = 0;
  for (const auto& [code, s] : big) {
    share[static_cast<std::size_t>(code - 1)] = s;
    assigned += s;
    ++n_assigned;
  }
  const double rest = (1.0 - assigned) / (47 - n_assigned);
  for (auto& s : share) {
    if (std::isnan(s)) s = rest;
  }

  std::array<double, 47> metro{};
  metro.fill(0.25);
  const std::pair<int, double> metro_map[] = {{13, 1.00}, {27, 0.83}, {14, 0.72}, {12, 0.62},
                                              {11, 0.60}, {28, 0.55}, {26, 0.55}, {23, 0.49},
                                              {40, 0.45}, {34, 0.38}, {4, 0.35}, {22, 0.33},
                                              {1, 0.30}, {33, 0.30}, {3, 0.00}, {2, 0.04},
                                              {5, 0.03}, {6, 0.06}, {39, 0.06}, {45, 0.05},
                                              {46, 0.08}, {31, 0.10}, {32, 0.08}};
  for (const auto& [code, u] : metro_map) metro[static_cast<std::size_t>(code - 1)] = u;

  double cum = 0.0;
  for (std::size_t k = 0; k < 47; ++k) {
    cum += share[k];
    t.share_cum[k] = cum;
    t.base_rate[k] = 0.022 + 0.166 * metro[k];
  }
  t.share_cum[46] = 1.0;
  return t;
}

}  // namespace

Generated gen_ssm_like(const SsmLikeConfig& config) {
  if (config.n < 100) throw DataError("gen_ssm_like: need n >= 100");
  const long n = config.n;
  Rng rng = Rng::derive(config.seed, 0x73736dULL);  // "ssm"
  const PrefectureTable pref = prefecture_table();

  auto cumulate = [](auto pmf) {
    std::vector<double> cum(pmf.size());
    double s = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      s += pmf[i];
      cum[i] = s;
    }
    cum.back() = 1.0;
    return cum;
  };
  const auto sib_cum = cumulate(kSiblingPmf);
  const auto score_cum = cumulate(kScorePmf);
  const auto edu_cum = cumulate(kEduPmf);
  const auto job_cum = cumulate(kJobPmf);

  Generated out;
  Dataset& ds = out.data;
  const int kPrefFirst = 6;
  const int p = 6 + 47 + 3;
  ds.covariates.setZero(n, p);
  ds.treatment.resize(n);
  ds.outcome.resize(n);
  ds.weights = Eigen::VectorXd::Ones(n);
  ds.missing_mask.setConstant(n, p, false);
  ds.column_names = {"male_c", "age_c", "cohort_c", "sib_c", "school_c", "score_c"};
  for (int k = 1; k <= 47; ++k) ds.column_names.push_back("pref=" + std::to_string(k));
  ds.column_names.push_back("inc_p");
  ds.column_names.push_back("edu_p");
  ds.column_names.push_back("job_p");
  ds.onehot_groups.emplace_back(kPrefFirst, kPrefFirst + 46);

  Truth& truth = out.truth;
  truth.tau_true.resize(n);
  truth.f_true.resize(n);
  truth.e_true.resize(n);
  truth.eps.resize(n);

  for (long i = 0; i < n; ++i) {
    const double male = rng.bernoulli(kMaleRate) ? 1.0 : 0.0;
    double age = rng.normal(kAgeMu, kAgeSigma);
    while (age < 20.0 || age > 80.0) age = rng.normal(kAgeMu, kAgeSigma);
    const int cohort = age_cohort(age);
    const double sib = static_cast<double>(rng.categorical(sib_cum));
    const double school = rng.bernoulli(kPrivateSchoolRate) ? 1.0 : 0.0;
    const double score = 1.0 + static_cast<double>(rng.categorical(score_cum));
    const int pref_idx = rng.categorical(pref.share_cum);
    const double inc = rng.normal();
    const double edu = 1.0 + static_cast<double>(rng.categorical(edu_cum));
    const double job = static_cast<double>(rng.categorical(job_cum));

    ds.covariates(i, 0) = male;
    ds.covariates(i, 1) = age;
    ds.covariates(i, 2) = cohort;
    ds.covariates(i, 3) = sib;
    ds.covariates(i, 4) = school;
    ds.covariates(i, 5) = score;
    ds.covariates(i, kPrefFirst + pref_idx) = 1.0;
    ds.covariates(i, kPrefFirst + 47) = inc;
    ds.covariates(i, kPrefFirst + 48) = edu;
    ds.covariates(i, kPrefFirst + 49) = job;

    const double z = logit(pref.base_rate[static_cast<std::size_t>(pref_idx)]) +
                     kPropInc * inc + kPropSchool * school +
                     kPropScore * (score - kScoreMean) + kPropShift;
    const double e = std::clamp(sigmoid(z), kOverlapLo, kOverlapHi);
    truth.e_true[i] = e;
    ds.treatment[i] = rng.bernoulli(e) ? 1.0 : 0.0;

    truth.f_true[i] = kFIntercept + kFInc * inc + kFEdu * (edu - kEduMean) / kEduSd +
                      kFScore * (score - kScoreMean) / kScoreSd +
                      kFSib * (sib - kSibMean) / kSibSd + kFMale * (male - kMaleRate);
    truth.tau_true[i] = config.planted_ate + config.income_slope * inc;
    truth.eps[i] = rng.normal(0.0, kNoiseSd);
    ds.outcome[i] = truth.f_true[i] + ds.treatment[i] * truth.tau_true[i] + truth.eps[i];
  }

  apply_mcar(ds, config.mcar_rate, rng);
  out.truth = finalize_truth(std::move(truth), ds.treatment);
  out.schema.treatment = "tutoring";
  out.schema.outcome = "it_edu";
  out.schema.categorical = {"pref"};
  out.schema.ordinal = {"cohort_c", "sib_c", "score_c", "edu_p", "job_p"};
  return out;
}

}  // namespace causalkit
