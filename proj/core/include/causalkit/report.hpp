#pragma once

#include <string>

#include <json.hpp>

namespace causalkit {

enum class Estimand { Ate, Att, CateGroup };

std::string to_string(Estimand e);

/// Point estimate with normal-approximation 95% interval. The interval is
/// always estimate +/- 1.96 * se, reconstructed rather than stored loosely,
/// so (estimate, se) and (ci_lo, ci_hi) can never drift apart.
struct EstimateReport {
  Estimand estimand = Estimand::Ate;
  std::string estimator;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  long n = 0;
};

EstimateReport make_report(Estimand estimand, std::string estimator, double estimate,
                           double se, long n);

nlohmann::ordered_json to_json(const EstimateReport& r);

}  // namespace causalkit
