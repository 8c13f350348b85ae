#include "causalkit/report.hpp"

namespace causalkit {

std::string to_string(Estimand e) {
  switch (e) {
    case Estimand::Ate: return "ATE";
    case Estimand::Att: return "ATT";
    case Estimand::CateGroup: return "CATE-group";
  }
  return "?";
}

EstimateReport make_report(Estimand estimand, std::string estimator, double estimate,
                           double se, long n) {
  EstimateReport r;
  r.estimand = estimand;
  r.estimator = std::move(estimator);
  r.estimate = estimate;
  r.se = se;
  r.ci_lo = estimate - 1.96 * se;
  r.ci_hi = estimate + 1.96 * se;
  r.n = n;
  return r;
}

nlohmann::ordered_json to_json(const EstimateReport& r) {
  return nlohmann::ordered_json{{"estimand", to_string(r.estimand)},
                                {"estimator", r.estimator},
                                {"estimate", r.estimate},
                                {"se", r.se},
                                {"ci_lo", r.ci_lo},
                                {"ci_hi", r.ci_hi},
                                {"n", r.n}};
}

}  // namespace causalkit
