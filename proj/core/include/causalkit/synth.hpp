#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/dataset.hpp"

namespace causalkit {

/// Ground truth retained next to a generated sample. The identity
/// Y = f(X) + W * tau(X) + eps holds bitwise on the stored vectors.
struct Truth {
  Eigen::VectorXd tau_true;
  Eigen::VectorXd f_true;
  Eigen::VectorXd e_true;
  Eigen::VectorXd eps;
  double ate_true = 0.0;
  double att_true = 0.0;
};

enum class CovariateLaw { StandardNormal, Uniform2 /* U(-2, 2) */, Uniform1 /* U(-1, 1) */ };

/// Small closed family of component functions, enough to express every
/// preset while keeping DGP definitions declarative.
struct FunctionSpec {
  enum class Kind { Constant, Linear, QuadraticX1, LogisticX1, StepX1 };
  Kind kind = Kind::Constant;
  double a = 0.0;  // Constant: value; Linear: intercept; QuadraticX1: scale;
                   // LogisticX1/StepX1: intercept/base
  double b = 0.0;  // LogisticX1: slope; StepX1: step height on 1{x1 > 0}
  Eigen::VectorXd coefs;  // Linear: inner product with x

  double operator()(const Eigen::VectorXd& x) const;

  static FunctionSpec constant(double value);
  static FunctionSpec linear(Eigen::VectorXd coefs, double intercept = 0.0);
  static FunctionSpec quadratic_x1(double scale);
  static FunctionSpec logistic_x1(double intercept, double slope);
  static FunctionSpec step_x1(double base, double height);
};

/// Declarative data-generating process. Propensities are forced into
/// [0.02, 0.98] so overlap holds by construction.
struct SyntheticDGP {
  long n = 1000;
  int p = 3;
  CovariateLaw law = CovariateLaw::StandardNormal;
  FunctionSpec baseline;    // f(x)
  FunctionSpec propensity;  // e(x), clamped to [0.02, 0.98]
  FunctionSpec effect;      // tau(x)
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
  double mcar_rate = 0.0;  // covariate cells masked missing at random
};

struct Generated {
  Dataset data;
  Truth truth;
  Schema schema;  // column roles for save_csv / reload round-trips
};

Generated gen(const SyntheticDGP& dgp);

/// Named presets used throughout the tests and the acceptance suite:
/// randomized-constant, confounded-linear, wrong-outcome-model,
/// wrong-propensity-model, heterogeneous-monotone.
std::vector<std::string> preset_names();
SyntheticDGP preset(const std::string& name, long n, std::uint64_t seed);

struct SsmLikeConfig {
  long n = 7817;
  std::uint64_t seed = 1;
  double planted_ate = 0.19;
  double income_slope = -0.15;  // tau(x) = planted_ate + income_slope * parental income
  double mcar_rate = 0.0;
};

/// Survey-like generator: demographic covariates matched to published
/// marginal moments, a 47-prefecture categorical with tutoring base rates
/// spanning roughly [0.022, 0.188], marginal treatment share 0.097, and a
/// standardized mobility outcome with sd near 1.14.
Generated gen_ssm_like(const SsmLikeConfig& config);

}  // namespace causalkit
