// Command-line pipeline: simulate / impute / balance / estimate / forest /
// rank / blp / calibrate / report. Every command is a pure function of its
// inputs, flags and seed; reruns produce byte-identical artifacts.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalkit/causal_forest.hpp"
#include "causalkit/causal_tree.hpp"
#include "causalkit/csv.hpp"
#include "causalkit/dataset.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/estimators.hpp"
#include "causalkit/parallel.hpp"
#include "causalkit/regression_forest.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace causalkit;

namespace {

constexpr int kSchemaVersion = 1;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

// Flags override config-file keys; config keys mirror long flag names.
template <typename T>
void merge(const json& cfg, CLI::App* sub, const std::string& flag, const std::string& key,
           T& var) {
  if (sub->count(flag) == 0 && cfg.contains(key)) {
    try {
      var = cfg.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: key '" + key + "' has the wrong type");
    }
  }
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) {
    throw ConfigError("--seed is required (no wall-clock default); pass --seed N");
  }
  return *seed;
}

ordered_json schema_to_json(const Schema& schema) {
  ordered_json j;
  j["treatment"] = schema.treatment;
  j["outcome"] = schema.outcome;
  j["weight"] = schema.weight ? ordered_json(*schema.weight) : ordered_json(nullptr);
  j["categorical"] = schema.categorical;
  j["ordinal"] = schema.ordinal;
  return j;
}

ordered_json report_json(const EstimateReport& r) { return to_json(r); }

ordered_json report_json_with_bias(const EstimateReport& r, std::optional<double> truth) {
  ordered_json j = to_json(r);
  if (truth) j["bias"] = r.estimate - *truth;
  return j;
}

struct TruthSidecar {
  double ate_true = 0.0;
  double att_true = 0.0;
};

std::optional<TruthSidecar> load_truth(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw ConfigError("truth: cannot open " + path);
  const json j = json::parse(in);
  TruthSidecar t;
  t.ate_true = j.at("ate_true").get<double>();
  t.att_true = j.at("att_true").get<double>();
  return t;
}

std::vector<Dataset> load_inputs(const std::vector<std::string>& inputs, const Schema& schema) {
  if (inputs.empty()) throw ConfigError("at least one --input file is required");
  std::vector<Dataset> out;
  out.reserve(inputs.size());
  for (const auto& path : inputs) out.push_back(load_csv(path, schema));
  return out;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& preset_name, long n, std::uint64_t seed,
                 const fs::path& out_dir, double mcar_rate, double planted_ate,
                 double income_slope) {
  Generated g;
  if (preset_name == "ssm-like") {
    SsmLikeConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    cfg.planted_ate = planted_ate;
    cfg.income_slope = income_slope;
    cfg.mcar_rate = mcar_rate;
    g = gen_ssm_like(cfg);
  } else {
    SyntheticDGP dgp = preset(preset_name, n, seed);
    dgp.mcar_rate = mcar_rate;
    g = gen(dgp);
  }

  fs::create_directories(out_dir);
  save_csv((out_dir / "dataset.csv").string(), g.data, g.schema);
  write_json(out_dir / "schema.json", schema_to_json(g.schema));

  CsvTable tau;
  tau.header = {"tau_true"};
  for (long i = 0; i < g.truth.tau_true.size(); ++i) {
    tau.rows.push_back({format_double(g.truth.tau_true[i])});
  }
  write_csv((out_dir / "tau_true.csv").string(), tau);

  ordered_json truth;
  truth["schema_version"] = kSchemaVersion;
  truth["ate_true"] = g.truth.ate_true;
  truth["att_true"] = g.truth.att_true;
  truth["tau_true_path"] = "tau_true.csv";
  write_json(out_dir / "truth.json", truth);
  std::cout << "wrote " << (out_dir / "dataset.csv").string() << " (n=" << g.data.n()
            << ", p=" << g.data.p() << ")\n";
  return 0;
}

// ------------------------------------------------------------------ impute

int cmd_impute(const std::string& input, const std::string& schema_path, int m,
               std::uint64_t seed, const fs::path& out_dir) {
  const Schema schema = Schema::from_json_file(schema_path);
  const Dataset ds = load_csv(input, schema);
  const auto imputed = impute(ds, m, seed);
  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < imputed.size(); ++k) {
    save_csv((out_dir / ("imputed_" + std::to_string(k + 1) + ".csv")).string(), imputed[k],
             schema);
  }
  write_json(out_dir / "schema.json", schema_to_json(schema));
  std::cout << "wrote " << m << " completed datasets to " << out_dir.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- balance

int cmd_balance(const std::string& input, const std::string& schema_path, std::uint64_t seed,
                const fs::path& out_dir, double clip_lo, double clip_hi) {
  const Schema schema = Schema::from_json_file(schema_path);
  const Dataset ds = load_csv(input, schema);
  if (ds.has_missing()) {
    throw DataError("balance: input has missing cells; run `impute` first");
  }
  // Inverse-propensity weights from cross-fitted logistic propensities.
  const NuisanceEstimates nuis =
      cross_fit_nuisances(ds, 5, seed, ClipBounds{clip_lo, clip_hi});
  Eigen::VectorXd ipw(ds.n());
  for (long i = 0; i < ds.n(); ++i) {
    ipw[i] = ds.weights[i] * (ds.treatment[i] == 1.0 ? 1.0 / nuis.e_hat[i]
                                                     : 1.0 / (1.0 - nuis.e_hat[i]));
  }
  const BalanceTable table = balance(ds, ipw);
  fs::create_directories(out_dir);
  table.write_csv((out_dir / "balance.csv").string());

  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["n"] = ds.n();
  summary["max_smd_unweighted"] = table.max_smd_unweighted();
  summary["max_smd_weighted"] = table.max_smd_weighted();
  int flagged = 0;
  for (const auto& row : table.rows) flagged += row.flagged ? 1 : 0;
  summary["n_flagged"] = flagged;
  write_json(out_dir / "balance_summary.json", summary);
  std::cout << "max SMD unweighted " << table.max_smd_unweighted() << ", ipw-weighted "
            << table.max_smd_weighted() << "\n";
  return 0;
}

// ---------------------------------------------------------------- estimate

NuisanceEstimates forest_nuisances(const Dataset& ds, std::uint64_t seed, ClipBounds clip) {
  RfParams rf;
  rf.num_trees = 500;
  rf.seed = Rng::derive(seed, 0x6e756973ULL).next_u64();
  const RegressionForest m_forest = rf_fit(ds.covariates, ds.outcome, rf, ds.weights);
  RfParams rf_e = rf;
  rf_e.seed = Rng::derive(seed, 0x70726f70ULL).next_u64();
  const RegressionForest e_forest = rf_fit(ds.covariates, ds.treatment, rf_e, ds.weights);

  // Per-arm outcome surfaces: out-of-bag inside the fitted arm, plain
  // prediction for the opposite arm (those rows never entered the fit).
  auto arm_surface = [&](double arm, std::uint64_t tag) {
    std::vector<long> rows;
    for (long i = 0; i < ds.n(); ++i) {
      if (ds.treatment[i] == arm) rows.push_back(i);
    }
    Eigen::MatrixXd xa(static_cast<long>(rows.size()), ds.p());
    Eigen::VectorXd ya(static_cast<long>(rows.size())), ua(static_cast<long>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      xa.row(static_cast<long>(k)) = ds.covariates.row(rows[k]);
      ya[static_cast<long>(k)] = ds.outcome[rows[k]];
      ua[static_cast<long>(k)] = ds.weights[rows[k]];
    }
    RfParams rfa = rf;
    rfa.seed = Rng::derive(seed, tag).next_u64();
    const RegressionForest f = rf_fit(xa, ya, rfa, ua);
    Eigen::VectorXd surface = f.predict(ds.covariates);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      surface[rows[k]] = f.oob_predictions[static_cast<long>(k)];
    }
    return surface;
  };

  NuisanceEstimates nuis;
  nuis.clip = clip;
  nuis.e_hat = e_forest.oob_predictions.cwiseMax(clip.lo).cwiseMin(clip.hi);
  nuis.mu0_hat = arm_surface(0.0, 0x6d753000ULL);
  nuis.mu1_hat = arm_surface(1.0, 0x6d753100ULL);
  nuis.m_hat = m_forest.oob_predictions;
  nuis.fold_id = Eigen::VectorXi::Zero(ds.n());
  return nuis;
}

int cmd_estimate(const std::vector<std::string>& inputs, const std::string& schema_path,
                 std::uint64_t seed, const fs::path& out_dir, int k_folds, double clip_lo,
                 double clip_hi, const std::string& nuisance_kind, bool horvitz_thompson,
                 const std::string& truth_path) {
  const Schema schema = Schema::from_json_file(schema_path);
  const auto datasets = load_inputs(inputs, schema);
  const auto truth = load_truth(truth_path);
  const ClipBounds clip{clip_lo, clip_hi};
  const IpwNormalization norm =
      horvitz_thompson ? IpwNormalization::HorvitzThompson : IpwNormalization::Hajek;

  struct Key {
    std::string name;
    Estimand estimand;
  };
  const std::vector<Key> keys = {{"naive", Estimand::Ate},
                                 {"regression", Estimand::Ate},
                                 {"ipw", Estimand::Ate},
                                 {"aipw", Estimand::Ate},
                                 {"aipw", Estimand::Att}};

  std::vector<std::vector<EstimateReport>> rounds;
  for (std::size_t m = 0; m < datasets.size(); ++m) {
    const Dataset& ds = datasets[m];
    if (ds.has_missing()) {
      throw DataError("estimate: input " + inputs[m] + " has missing cells; run `impute` first");
    }
    const std::uint64_t round_seed = Rng::derive(seed, 9000 + m).next_u64();
    const NuisanceEstimates nuis = nuisance_kind == "forest"
                                       ? forest_nuisances(ds, round_seed, clip)
                                       : cross_fit_nuisances(ds, k_folds, round_seed, clip);
    std::vector<EstimateReport> reports;
    reports.push_back(naive_diff(ds));
    reports.push_back(reg_ate(ds, nuis));
    reports.push_back(ipw_ate(ds, nuis, norm));
    reports.push_back(aipw_ate(ds, nuis, AteTarget::All));
    reports.push_back(aipw_ate(ds, nuis, AteTarget::Treated));
    rounds.push_back(std::move(reports));
  }

  auto truth_for = [&](Estimand e) -> std::optional<double> {
    if (!truth) return std::nullopt;
    return e == Estimand::Att ? truth->att_true : truth->ate_true;
  };

  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "estimate";
  out["n_imputations"] = datasets.size();
  out["nuisance"] = nuisance_kind;
  out["k_folds"] = k_folds;
  out["clip"] = {clip.lo, clip.hi};

  ordered_json per_imp = ordered_json::array();
  for (const auto& reports : rounds) {
    ordered_json round = ordered_json::array();
    for (const auto& r : reports) round.push_back(report_json_with_bias(r, truth_for(r.estimand)));
    per_imp.push_back(std::move(round));
  }

  ordered_json final_reports = ordered_json::array();
  if (datasets.size() == 1) {
    for (const auto& r : rounds[0]) {
      final_reports.push_back(report_json_with_bias(r, truth_for(r.estimand)));
    }
  } else {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      std::vector<std::pair<double, double>> pairs;
      for (const auto& reports : rounds) {
        pairs.emplace_back(reports[k].estimate, reports[k].se);
      }
      EstimateReport pooled = pool_estimates(pairs, keys[k].estimand, keys[k].name);
      pooled.n = rounds[0][k].n;
      final_reports.push_back(report_json_with_bias(pooled, truth_for(keys[k].estimand)));
    }
    out["per_imputation"] = std::move(per_imp);
  }
  out["reports"] = std::move(final_reports);

  fs::create_directories(out_dir);
  write_json(out_dir / "estimates.json", out);
  std::cout << "wrote " << (out_dir / "estimates.json").string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ forest

struct ForestFlags {
  int num_trees = 2000;
  int min_treated = 5;
  int min_control = 5;
  double subsample_fraction = 0.5;
  int mtry = 0;
  int stage1_trees = 500;
  double clip_lo = 0.01;
  double clip_hi = 0.99;
  std::string select_vars = "off";  // off | mean
  std::string subgroup_covariate;   // empty = most important continuous one
  int num_rankings = 5;
  std::string blp_covariates;  // comma list; empty = all non-one-hot columns
  bool emit_tree = false;
};

Dataset project_columns(const Dataset& ds, const std::vector<int>& cols) {
  Dataset out;
  out.covariates.resize(ds.n(), static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.covariates.col(static_cast<int>(c)) = ds.covariates.col(cols[c]);
    out.column_names.push_back(ds.column_names[static_cast<std::size_t>(cols[c])]);
  }
  out.treatment = ds.treatment;
  out.outcome = ds.outcome;
  out.weights = ds.weights;
  out.missing_mask.setConstant(ds.n(), static_cast<int>(cols.size()), false);
  return out;
}

std::vector<int> non_onehot_columns(const Dataset& ds) {
  std::vector<bool> in_group(static_cast<std::size_t>(ds.p()), false);
  for (const auto& [first, last] : ds.onehot_groups) {
    for (int j = first; j <= last; ++j) in_group[static_cast<std::size_t>(j)] = true;
  }
  std::vector<int> out;
  for (int j = 0; j < ds.p(); ++j) {
    if (!in_group[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

std::vector<std::string> quintile_labels(const Eigen::VectorXd& values, int bins) {
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  std::vector<double> breaks;
  for (int j = 1; j < bins; ++j) breaks.push_back(quantile(static_cast<double>(j) / bins));
  std::vector<std::string> labels(static_cast<std::size_t>(values.size()));
  for (long i = 0; i < values.size(); ++i) {
    int b = 0;
    while (b < static_cast<int>(breaks.size()) && values[i] > breaks[static_cast<std::size_t>(b)]) {
      ++b;
    }
    labels[static_cast<std::size_t>(i)] = "Q" + std::to_string(b + 1);
  }
  return labels;
}

int cmd_forest(const std::vector<std::string>& inputs, const std::string& schema_path,
               std::uint64_t seed, const fs::path& out_dir, const ForestFlags& flags,
               const std::string& truth_path) {
  const Schema schema = Schema::from_json_file(schema_path);
  const auto datasets = load_inputs(inputs, schema);
  const auto truth = load_truth(truth_path);

  CfParams params;
  params.num_trees = flags.num_trees;
  params.min_treated = flags.min_treated;
  params.min_control = flags.min_control;
  params.subsample_fraction = flags.subsample_fraction;
  params.mtry = flags.mtry;
  params.stage1_trees = flags.stage1_trees;
  params.clip = ClipBounds{flags.clip_lo, flags.clip_hi};

  struct Fitted {
    CausalForest forest;
    std::vector<int> selected;  // column ids in the original dataset
  };
  std::vector<Fitted> fits;
  std::vector<EstimateReport> ates, atts;
  for (std::size_t m = 0; m < datasets.size(); ++m) {
    const Dataset& ds = datasets[m];
    if (ds.has_missing()) {
      throw DataError("forest: input " + inputs[m] + " has missing cells; run `impute` first");
    }
    const std::uint64_t fit_seed = Rng::derive(seed, 7000 + m).next_u64();
    CfParams p = params;
    p.seed = fit_seed;
    Fitted fitted{cf_fit(ds, p, fit_seed), {}};
    for (int j = 0; j < ds.p(); ++j) fitted.selected.push_back(j);
    if (flags.select_vars == "mean") {
      const Eigen::VectorXd imp = cf_variable_importance(fitted.forest);
      const std::vector<int> keep = select_above_mean(imp);
      if (!keep.empty() && static_cast<int>(keep.size()) < ds.p()) {
        const Dataset reduced = project_columns(ds, keep);
        const std::uint64_t refit_seed = Rng::derive(seed, 7500 + m).next_u64();
        CfParams p2 = params;
        p2.seed = refit_seed;
        fitted = Fitted{cf_fit(reduced, p2, refit_seed), keep};
      }
    }
    ates.push_back(cf_ate(fitted.forest, AteTarget::All));
    atts.push_back(cf_ate(fitted.forest, AteTarget::Treated));
    fits.push_back(std::move(fitted));
  }

  const CausalForest& lead = fits[0].forest;  // diagnostics come from imputation 1
  const Dataset& lead_data = lead.data;

  EstimateReport ate = ates[0], att = atts[0];
  if (datasets.size() > 1) {
    std::vector<std::pair<double, double>> ap, tp;
    for (std::size_t m = 0; m < datasets.size(); ++m) {
      ap.emplace_back(ates[m].estimate, ates[m].se);
      tp.emplace_back(atts[m].estimate, atts[m].se);
    }
    ate = pool_estimates(ap, Estimand::Ate, "causal-forest-aipw");
    att = pool_estimates(tp, Estimand::Att, "causal-forest-aipw");
    ate.n = ates[0].n;
    att.n = atts[0].n;
  }

  // Importance averaged over imputations (aligned back to original columns).
  Eigen::VectorXd importance = Eigen::VectorXd::Zero(datasets[0].p());
  for (const auto& fitted : fits) {
    const Eigen::VectorXd imp = cf_variable_importance(fitted.forest);
    for (std::size_t c = 0; c < fitted.selected.size(); ++c) {
      importance[fitted.selected[c]] += imp[static_cast<long>(c)];
    }
  }
  importance /= static_cast<double>(fits.size());

  // Subgroup covariate: flag, or the most important column with enough
  // distinct values to cut into quintiles.
  int subgroup_col = -1;
  if (!flags.subgroup_covariate.empty()) {
    subgroup_col = datasets[0].column_index(flags.subgroup_covariate);
  } else {
    std::vector<int> order(static_cast<std::size_t>(datasets[0].p()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return importance[a] > importance[b] || (importance[a] == importance[b] && a < b);
    });
    for (int j : order) {
      std::set<double> distinct;
      for (long i = 0; i < lead_data.n() && distinct.size() <= 8; ++i) {
        distinct.insert(lead_data.covariates(i, fits[0].selected.size() == 0 ? j : j));
      }
      // Use the original-dataset column so labels exist even after selection.
      std::set<double> vals;
      for (long i = 0; i < datasets[0].n() && vals.size() <= 8; ++i) {
        vals.insert(datasets[0].covariates(i, j));
      }
      if (vals.size() > 8) {
        subgroup_col = j;
        break;
      }
    }
    if (subgroup_col < 0) subgroup_col = 0;
  }
  const std::vector<std::string> group_labels =
      quintile_labels(datasets[0].covariates.col(subgroup_col), 5);
  const auto subgroups = cf_subgroup_cate(lead, group_labels);

  const RankAteResult ranks = cf_rank_ate(lead, flags.num_rankings);
  const CalibrationResult calibration = cf_test_calibration(lead);

  // Best linear projection covariates.
  std::vector<int> blp_cols;
  if (!flags.blp_covariates.empty()) {
    std::stringstream ss(flags.blp_covariates);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) blp_cols.push_back(datasets[0].column_index(name));
    }
  } else {
    blp_cols = non_onehot_columns(datasets[0]);
  }
  Eigen::MatrixXd a(datasets[0].n(), static_cast<int>(blp_cols.size()));
  std::vector<std::string> blp_names;
  for (std::size_t c = 0; c < blp_cols.size(); ++c) {
    a.col(static_cast<int>(c)) = datasets[0].covariates.col(blp_cols[c]);
    blp_names.push_back(datasets[0].column_names[static_cast<std::size_t>(blp_cols[c])]);
  }
  const auto blp = best_linear_projection(lead.scores, a, blp_names, lead_data.weights);

  fs::create_directories(out_dir);

  // scores.csv: per-unit quantities every downstream command can reuse.
  {
    CsvTable t;
    t.header = {"row", "y", "w", "weight", "e_hat", "m_hat", "oob_tau", "aipw_score"};
    for (long i = 0; i < lead_data.n(); ++i) {
      t.rows.push_back({std::to_string(i + 1), format_double(lead_data.outcome[i]),
                        format_double(lead_data.treatment[i]),
                        format_double(lead_data.weights[i]),
                        format_double(lead.nuisance.e_hat[i]),
                        format_double(lead.nuisance.m_hat[i]), format_double(lead.oob_tau[i]),
                        format_double(lead.scores[i])});
    }
    write_csv((out_dir / "scores.csv").string(), t);
  }

  // Plot-ready CSVs.
  {
    CsvTable t;  // CATE histogram
    t.header = {"bin_lo", "bin_hi", "count"};
    const double lo = lead.oob_tau.minCoeff(), hi = lead.oob_tau.maxCoeff();
    const int bins = 30;
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (long i = 0; i < lead.oob_tau.size(); ++i) {
      int b = static_cast<int>((lead.oob_tau[i] - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      counts[static_cast<std::size_t>(b)]++;
    }
    for (int b = 0; b < bins; ++b) {
      t.rows.push_back({format_double(lo + b * width), format_double(lo + (b + 1) * width),
                        std::to_string(counts[static_cast<std::size_t>(b)])});
    }
    write_csv((out_dir / "cate_hist.csv").string(), t);
  }
  {
    CsvTable t;  // importance bars, descending
    t.header = {"covariate", "importance"};
    std::vector<int> order(static_cast<std::size_t>(datasets[0].p()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return importance[x] > importance[y] || (importance[x] == importance[y] && x < y);
    });
    for (int j : order) {
      t.rows.push_back({datasets[0].column_names[static_cast<std::size_t>(j)],
                        format_double(importance[j])});
    }
    write_csv((out_dir / "importance.csv").string(), t);
  }
  {
    CsvTable t;  // subgroup CATEs with CI columns
    t.header = {"group", "estimate", "se", "ci_lo", "ci_hi", "n", "note"};
    for (const auto& grp : subgroups) {
      if (grp.report) {
        t.rows.push_back({grp.label, format_double(grp.report->estimate),
                          format_double(grp.report->se), format_double(grp.report->ci_lo),
                          format_double(grp.report->ci_hi), std::to_string(grp.report->n), ""});
      } else {
        t.rows.push_back({grp.label, "", "", "", "", "", grp.missing_reason});
      }
    }
    write_csv((out_dir / "subgroup_cate.csv").string(), t);
  }
  {
    CsvTable t;  // rank ATEs
    t.header = {"rank", "estimate", "se", "ci_lo", "ci_hi", "n"};
    for (std::size_t q = 0; q < ranks.per_rank.size(); ++q) {
      const auto& r = ranks.per_rank[q];
      t.rows.push_back({"Q" + std::to_string(q + 1), format_double(r.estimate),
                        format_double(r.se), format_double(r.ci_lo), format_double(r.ci_hi),
                        std::to_string(r.n)});
    }
    write_csv((out_dir / "rank_ate.csv").string(), t);
  }
  {
    CsvTable t;  // ATE / ATT intervals
    t.header = {"estimand", "estimate", "se", "ci_lo", "ci_hi"};
    for (const auto& r : {ate, att}) {
      t.rows.push_back({to_string(r.estimand), format_double(r.estimate), format_double(r.se),
                        format_double(r.ci_lo), format_double(r.ci_hi)});
    }
    write_csv((out_dir / "ate_att.csv").string(), t);
  }

  if (flags.emit_tree) {
    CtParams tree_params;
    const CausalTree tree = ct_fit(datasets[0], tree_params, Rng::derive(seed, 8800).next_u64());
    write_json(out_dir / "tree.json", tree.to_json());
  }

  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "forest";
  out["n"] = datasets[0].n();
  out["n_imputations"] = datasets.size();
  out["params"] = {{"num_trees", params.num_trees},
                   {"min_treated", params.min_treated},
                   {"min_control", params.min_control},
                   {"subsample_fraction", params.subsample_fraction},
                   {"mtry", params.mtry},
                   {"stage1_trees", params.stage1_trees},
                   {"clip", {params.clip.lo, params.clip.hi}},
                   {"select_vars", flags.select_vars},
                   {"num_rankings", flags.num_rankings},
                   {"seed", seed}};
  if (fits[0].selected.size() < static_cast<std::size_t>(datasets[0].p())) {
    ordered_json sel = ordered_json::array();
    for (int j : fits[0].selected) {
      sel.push_back(datasets[0].column_names[static_cast<std::size_t>(j)]);
    }
    out["selected_features"] = std::move(sel);
  }
  out["ate"] = report_json_with_bias(ate, truth ? std::optional<double>(truth->ate_true)
                                                : std::nullopt);
  out["att"] = report_json_with_bias(att, truth ? std::optional<double>(truth->att_true)
                                                : std::nullopt);
  {
    ordered_json imp = ordered_json::array();
    for (int j = 0; j < datasets[0].p(); ++j) {
      imp.push_back({{"covariate", datasets[0].column_names[static_cast<std::size_t>(j)]},
                     {"importance", importance[j]}});
    }
    out["importance"] = std::move(imp);
  }
  out["calibration"] = {{"coef_mean", calibration.coef_mean},
                        {"se_mean", calibration.se_mean},
                        {"coef_differential", calibration.coef_differential},
                        {"se_differential", calibration.se_differential},
                        {"t_differential", calibration.t_differential()},
                        {"p_differential_one_sided", calibration.p_differential()},
                        {"differential_defined", calibration.differential_defined}};
  {
    ordered_json blp_json = ordered_json::array();
    for (const auto& row : blp) {
      blp_json.push_back(
          {{"name", row.name}, {"coef", row.coef}, {"se", row.se}, {"p", row.p_value}});
    }
    out["blp"] = std::move(blp_json);
  }
  {
    ordered_json rank_json = ordered_json::array();
    for (std::size_t q = 0; q < ranks.per_rank.size(); ++q) {
      ordered_json r = report_json(ranks.per_rank[q]);
      r["rank"] = "Q" + std::to_string(q + 1);
      rank_json.push_back(std::move(r));
    }
    out["rank_ate"] = std::move(rank_json);
    out["rank_degenerate"] = ranks.degenerate;
  }
  out["subgroup_covariate"] = datasets[0].column_names[static_cast<std::size_t>(subgroup_col)];
  out["flags"] = {{"oob_uncovered", lead.oob_uncovered},
                  {"denominator_fallbacks", lead.denominator_fallbacks}};
  write_json(out_dir / "forest_summary.json", out);
  std::cout << "ATE " << ate.estimate << " +/- " << 1.96 * ate.se << "; ATT " << att.estimate
            << " +/- " << 1.96 * att.se << "\n";
  return 0;
}

// ------------------------------------------------- rank / calibrate / blp

struct ScoresFile {
  Eigen::VectorXd y, w, weight, e_hat, m_hat, oob_tau, aipw_score;
};

ScoresFile load_scores(const std::string& path) {
  const CsvTable t = read_csv(path);
  auto col = [&](const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw ConfigError("scores: missing column '" + name + "'");
    const long j = it - t.header.begin();
    Eigen::VectorXd out(static_cast<long>(t.rows.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      out[static_cast<long>(i)] = std::stod(t.rows[i][static_cast<std::size_t>(j)]);
    }
    return out;
  };
  ScoresFile s;
  s.y = col("y");
  s.w = col("w");
  s.weight = col("weight");
  s.e_hat = col("e_hat");
  s.m_hat = col("m_hat");
  s.oob_tau = col("oob_tau");
  s.aipw_score = col("aipw_score");
  return s;
}

int cmd_rank(const std::string& scores_path, int num_rankings, const fs::path& out_dir) {
  const ScoresFile s = load_scores(scores_path);
  const RankAteResult ranks = rank_average_effects(s.aipw_score, s.oob_tau, s.weight, num_rankings);
  fs::create_directories(out_dir);
  CsvTable t;
  t.header = {"rank", "estimate", "se", "ci_lo", "ci_hi", "n"};
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "rank";
  out["degenerate"] = ranks.degenerate;
  ordered_json rows = ordered_json::array();
  for (std::size_t q = 0; q < ranks.per_rank.size(); ++q) {
    const auto& r = ranks.per_rank[q];
    t.rows.push_back({"Q" + std::to_string(q + 1), format_double(r.estimate), format_double(r.se),
                      format_double(r.ci_lo), format_double(r.ci_hi), std::to_string(r.n)});
    ordered_json j = report_json(r);
    j["rank"] = "Q" + std::to_string(q + 1);
    rows.push_back(std::move(j));
  }
  out["rank_ate"] = std::move(rows);
  write_csv((out_dir / "rank_ate.csv").string(), t);
  write_json(out_dir / "rank_summary.json", out);
  std::cout << "wrote " << (out_dir / "rank_ate.csv").string() << "\n";
  return 0;
}

int cmd_calibrate(const std::string& scores_path, const fs::path& out_dir) {
  const ScoresFile s = load_scores(scores_path);
  const CalibrationResult r = calibration_test(s.aipw_score, s.oob_tau, s.weight);
  fs::create_directories(out_dir);
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "calibrate";
  out["coef_mean"] = r.coef_mean;
  out["se_mean"] = r.se_mean;
  out["coef_differential"] = r.coef_differential;
  out["se_differential"] = r.se_differential;
  out["t_differential"] = r.t_differential();
  out["p_differential_one_sided"] = r.p_differential();
  out["differential_defined"] = r.differential_defined;
  write_json(out_dir / "calibration.json", out);
  std::cout << "mean coef " << r.coef_mean << ", differential coef " << r.coef_differential
            << " (one-sided p " << r.p_differential() << ")\n";
  return 0;
}

int cmd_blp(const std::string& scores_path, const std::string& input,
            const std::string& schema_path, const std::string& covariates,
            const fs::path& out_dir) {
  const ScoresFile s = load_scores(scores_path);
  const Schema schema = Schema::from_json_file(schema_path);
  const Dataset ds = load_csv(input, schema);
  if (ds.n() != s.aipw_score.size()) {
    throw DataError("blp: scores and dataset row counts disagree");
  }
  std::vector<int> cols;
  if (!covariates.empty()) {
    std::stringstream ss(covariates);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) cols.push_back(ds.column_index(name));
    }
  } else {
    cols = non_onehot_columns(ds);
  }
  Eigen::MatrixXd a(ds.n(), static_cast<int>(cols.size()));
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    a.col(static_cast<int>(c)) = ds.covariates.col(cols[c]);
    names.push_back(ds.column_names[static_cast<std::size_t>(cols[c])]);
  }
  const auto rows = best_linear_projection(s.aipw_score, a, names, s.weight);
  fs::create_directories(out_dir);
  CsvTable t;
  t.header = {"name", "coef", "se", "p"};
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "blp";
  ordered_json jrows = ordered_json::array();
  for (const auto& row : rows) {
    t.rows.push_back(
        {row.name, format_double(row.coef), format_double(row.se), format_double(row.p_value)});
    jrows.push_back({{"name", row.name}, {"coef", row.coef}, {"se", row.se}, {"p", row.p_value}});
  }
  out["rows"] = std::move(jrows);
  write_csv((out_dir / "blp.csv").string(), t);
  write_json(out_dir / "blp.json", out);
  std::cout << "wrote " << (out_dir / "blp.csv").string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ report

int cmd_report(const fs::path& in_dir, const fs::path& out_dir) {
  std::ostringstream text;
  text << "== analysis report ==\n";
  auto maybe_json = [&](const fs::path& p) -> std::optional<json> {
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream in(p);
    return json::parse(in);
  };

  if (const auto bal = maybe_json(in_dir / "balance_summary.json")) {
    text << "\n-- balance --\n";
    text << "max SMD unweighted: " << bal->at("max_smd_unweighted").get<double>() << "\n";
    text << "max SMD weighted:   " << bal->at("max_smd_weighted").get<double>() << "\n";
    text << "covariates above 0.1 after weighting: " << bal->at("n_flagged").get<long>() << "\n";
  }
  if (const auto est = maybe_json(in_dir / "estimates.json")) {
    text << "\n-- average treatment effects --\n";
    for (const auto& r : est->at("reports")) {
      text << r.at("estimator").get<std::string>() << " (" << r.at("estimand").get<std::string>()
           << "): " << r.at("estimate").get<double>() << " [" << r.at("ci_lo").get<double>()
           << ", " << r.at("ci_hi").get<double>() << "]";
      if (r.contains("bias")) text << "  bias " << r.at("bias").get<double>();
      text << "\n";
    }
  }
  if (const auto forest = maybe_json(in_dir / "forest_summary.json")) {
    text << "\n-- causal forest --\n";
    const auto& ate = forest->at("ate");
    const auto& att = forest->at("att");
    text << "ATE: " << ate.at("estimate").get<double>() << " [" << ate.at("ci_lo").get<double>()
         << ", " << ate.at("ci_hi").get<double>() << "]\n";
    text << "ATT: " << att.at("estimate").get<double>() << " [" << att.at("ci_lo").get<double>()
         << ", " << att.at("ci_hi").get<double>() << "]\n";
    text << "top variables:\n";
    int shown = 0;
    for (const auto& row : forest->at("importance")) {
      if (shown++ >= 5) break;
      text << "  " << row.at("covariate").get<std::string>() << "  "
           << row.at("importance").get<double>() << "\n";
    }
    const auto& cal = forest->at("calibration");
    text << "calibration: mean " << cal.at("coef_mean").get<double>() << ", differential "
         << cal.at("coef_differential").get<double>() << " (one-sided p "
         << cal.at("p_differential_one_sided").get<double>() << ")\n";
  }
  if (const auto cal = maybe_json(in_dir / "calibration.json")) {
    text << "\n-- calibration --\n";
    text << "mean coef: " << cal->at("coef_mean").get<double>() << "\n";
    text << "differential coef: " << cal->at("coef_differential").get<double>()
         << " (one-sided p " << cal->at("p_differential_one_sided").get<double>() << ")\n";
  }
  if (const auto tree = maybe_json(in_dir / "tree.json")) {
    text << "\n-- honest causal tree --\n";
    text << "depth " << tree->at("chosen_depth").get<int>() << ", nodes "
         << tree->at("nodes").size() << "\n";
    for (const auto& node : tree->at("nodes")) {
      if (node.contains("leaf")) {
        text << "  leaf " << node.at("id").get<int>() << ": tau "
             << node.at("tau").get<double>() << " (treated " << node.at("n_treated").get<int>()
             << ", control " << node.at("n_control").get<int>() << ")\n";
      }
    }
  }

  const std::string rendered = text.str();
  std::cout << rendered;
  fs::create_directories(out_dir);
  write_text(out_dir / "report.txt", rendered);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal inference pipeline: estimation, honest forests, diagnostics"};
  app.require_subcommand(1);

  // Config file pre-scan: flat JSON keys mirroring long flag names.
  json cfg = json::object();
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = load_config_json(argv[i + 1]);
      } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its keys");
    sub->add_option("--seed", seed, "RNG seed (required for randomized commands)");
    sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
  };
  auto merge_common = [&](CLI::App* sub) {
    if (sub->count("--seed") == 0 && cfg.contains("seed")) {
      seed = cfg.at("seed").get<std::uint64_t>();
    }
    merge(cfg, sub, "--out-dir", "out-dir", out_dir);
    merge(cfg, sub, "--threads", "threads", threads);
    if (threads > 0) set_max_threads(threads);
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset with ground truth");
  std::string preset_name = "confounded-linear";
  long sim_n = 1000;
  double mcar_rate = 0.0, planted_ate = 0.19, income_slope = -0.15;
  sim->add_option("--preset", preset_name,
                  "randomized-constant | confounded-linear | wrong-outcome-model | "
                  "wrong-propensity-model | heterogeneous-monotone | ssm-like")
      ->capture_default_str();
  sim->add_option("--n", sim_n, "sample size")->capture_default_str();
  sim->add_option("--mcar-rate", mcar_rate, "missing-completely-at-random cell rate");
  sim->add_option("--planted-ate", planted_ate, "ssm-like: planted average effect");
  sim->add_option("--income-slope", income_slope, "ssm-like: effect slope in parental income");
  add_common(sim);

  // impute
  auto* imp = app.add_subcommand("impute", "multiple imputation by stochastic regression");
  std::string input_one, schema_path;
  int m_imputations = 5;
  imp->add_option("--input", input_one, "dataset CSV")->required();
  imp->add_option("--schema", schema_path, "schema JSON")->required();
  imp->add_option("--m", m_imputations, "number of imputations")->capture_default_str();
  add_common(imp);

  // balance
  auto* bal = app.add_subcommand("balance", "standardized mean differences, raw and IPW-weighted");
  std::string bal_input, bal_schema;
  double clip_lo = 0.01, clip_hi = 0.99;
  bal->add_option("--input", bal_input, "dataset CSV")->required();
  bal->add_option("--schema", bal_schema, "schema JSON")->required();
  bal->add_option("--clip-lo", clip_lo, "propensity clip lower bound")->capture_default_str();
  bal->add_option("--clip-hi", clip_hi, "propensity clip upper bound")->capture_default_str();
  add_common(bal);

  // estimate
  auto* est = app.add_subcommand("estimate", "naive, regression, IPW and AIPW effects");
  std::vector<std::string> est_inputs;
  std::string est_schema, est_truth, nuisance_kind = "linear";
  int k_folds = 5;
  bool horvitz_thompson = false;
  est->add_option("--input", est_inputs, "dataset CSV (repeat for imputations)")->required();
  est->add_option("--schema", est_schema, "schema JSON")->required();
  est->add_option("--truth", est_truth, "truth sidecar JSON (adds bias columns)");
  est->add_option("--k-folds", k_folds, "cross-fitting folds")->capture_default_str();
  est->add_option("--nuisance", nuisance_kind, "linear | forest")->capture_default_str();
  est->add_flag("--horvitz-thompson", horvitz_thompson,
                "literal inverse-probability sum instead of Hajek normalization");
  est->add_option("--clip-lo", clip_lo, "propensity clip lower bound")->capture_default_str();
  est->add_option("--clip-hi", clip_hi, "propensity clip upper bound")->capture_default_str();
  add_common(est);

  // forest
  auto* fo = app.add_subcommand("forest", "causal forest with heterogeneity diagnostics");
  std::vector<std::string> fo_inputs;
  std::string fo_schema, fo_truth;
  ForestFlags ff;
  fo->add_option("--input", fo_inputs, "dataset CSV (repeat for imputations)")->required();
  fo->add_option("--schema", fo_schema, "schema JSON")->required();
  fo->add_option("--truth", fo_truth, "truth sidecar JSON (adds bias fields)");
  fo->add_option("--num-trees", ff.num_trees)->capture_default_str();
  fo->add_option("--min-treated", ff.min_treated)->capture_default_str();
  fo->add_option("--min-control", ff.min_control)->capture_default_str();
  fo->add_option("--subsample-fraction", ff.subsample_fraction)->capture_default_str();
  fo->add_option("--mtry", ff.mtry, "0 = auto")->capture_default_str();
  fo->add_option("--stage1-trees", ff.stage1_trees)->capture_default_str();
  fo->add_option("--clip-lo", ff.clip_lo)->capture_default_str();
  fo->add_option("--clip-hi", ff.clip_hi)->capture_default_str();
  fo->add_option("--select-vars", ff.select_vars, "off | mean (two-pass refit)")
      ->capture_default_str();
  fo->add_option("--subgroup-covariate", ff.subgroup_covariate,
                 "covariate for subgroup CATEs (default: most important)");
  fo->add_option("--num-rankings", ff.num_rankings)->capture_default_str();
  fo->add_option("--blp-covariates", ff.blp_covariates,
                 "comma list for the best linear projection (default: all non-one-hot)");
  fo->add_flag("--emit-tree", ff.emit_tree, "also fit and serialize a single honest causal tree");
  add_common(fo);

  // rank / calibrate / blp
  auto* rk = app.add_subcommand("rank", "ATE by quantile of predicted effects, from scores.csv");
  std::string scores_path;
  int num_rankings = 5;
  rk->add_option("--scores", scores_path, "scores.csv from `forest`")->required();
  rk->add_option("--num-rankings", num_rankings)->capture_default_str();
  add_common(rk);

  auto* ca = app.add_subcommand("calibrate", "calibration test from scores.csv");
  ca->add_option("--scores", scores_path, "scores.csv from `forest`")->required();
  add_common(ca);

  auto* bl = app.add_subcommand("blp", "best linear projection from scores.csv");
  std::string blp_input, blp_schema, blp_covariates;
  bl->add_option("--scores", scores_path, "scores.csv from `forest`")->required();
  bl->add_option("--input", blp_input, "dataset CSV (projection covariates)")->required();
  bl->add_option("--schema", blp_schema, "schema JSON")->required();
  bl->add_option("--covariates", blp_covariates, "comma list (default: all non-one-hot)");
  add_common(bl);

  auto* re = app.add_subcommand("report", "render artifacts in a directory as text");
  std::string in_dir = ".";
  re->add_option("--in-dir", in_dir, "artifact directory")->capture_default_str();
  add_common(re);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      merge_common(sim);
      merge(cfg, sim, "--preset", "preset", preset_name);
      merge(cfg, sim, "--n", "n", sim_n);
      merge(cfg, sim, "--mcar-rate", "mcar-rate", mcar_rate);
      merge(cfg, sim, "--planted-ate", "planted-ate", planted_ate);
      merge(cfg, sim, "--income-slope", "income-slope", income_slope);
      return cmd_simulate(preset_name, sim_n, require_seed(seed), out_dir, mcar_rate,
                          planted_ate, income_slope);
    }
    if (imp->parsed()) {
      merge_common(imp);
      merge(cfg, imp, "--m", "m", m_imputations);
      return cmd_impute(input_one, schema_path, m_imputations, require_seed(seed), out_dir);
    }
    if (bal->parsed()) {
      merge_common(bal);
      merge(cfg, bal, "--clip-lo", "clip-lo", clip_lo);
      merge(cfg, bal, "--clip-hi", "clip-hi", clip_hi);
      return cmd_balance(bal_input, bal_schema, require_seed(seed), out_dir, clip_lo, clip_hi);
    }
    if (est->parsed()) {
      merge_common(est);
      merge(cfg, est, "--k-folds", "k-folds", k_folds);
      merge(cfg, est, "--nuisance", "nuisance", nuisance_kind);
      merge(cfg, est, "--clip-lo", "clip-lo", clip_lo);
      merge(cfg, est, "--clip-hi", "clip-hi", clip_hi);
      if (nuisance_kind != "linear" && nuisance_kind != "forest") {
        throw ConfigError("--nuisance must be 'linear' or 'forest'");
      }
      return cmd_estimate(est_inputs, est_schema, require_seed(seed), out_dir, k_folds, clip_lo,
                          clip_hi, nuisance_kind, horvitz_thompson, est_truth);
    }
    if (fo->parsed()) {
      merge_common(fo);
      merge(cfg, fo, "--num-trees", "num-trees", ff.num_trees);
      merge(cfg, fo, "--min-treated", "min-treated", ff.min_treated);
      merge(cfg, fo, "--min-control", "min-control", ff.min_control);
      merge(cfg, fo, "--subsample-fraction", "subsample-fraction", ff.subsample_fraction);
      merge(cfg, fo, "--mtry", "mtry", ff.mtry);
      merge(cfg, fo, "--stage1-trees", "stage1-trees", ff.stage1_trees);
      merge(cfg, fo, "--clip-lo", "clip-lo", ff.clip_lo);
      merge(cfg, fo, "--clip-hi", "clip-hi", ff.clip_hi);
      merge(cfg, fo, "--select-vars", "select-vars", ff.select_vars);
      merge(cfg, fo, "--subgroup-covariate", "subgroup-covariate", ff.subgroup_covariate);
      merge(cfg, fo, "--num-rankings", "num-rankings", ff.num_rankings);
      merge(cfg, fo, "--blp-covariates", "blp-covariates", ff.blp_covariates);
      if (ff.select_vars != "off" && ff.select_vars != "mean") {
        throw ConfigError("--select-vars must be 'off' or 'mean'");
      }
      return cmd_forest(fo_inputs, fo_schema, require_seed(seed), out_dir, ff, fo_truth);
    }
    if (rk->parsed()) {
      merge_common(rk);
      merge(cfg, rk, "--num-rankings", "num-rankings", num_rankings);
      return cmd_rank(scores_path, num_rankings, out_dir);
    }
    if (ca->parsed()) {
      merge_common(ca);
      return cmd_calibrate(scores_path, out_dir);
    }
    if (bl->parsed()) {
      merge_common(bl);
      merge(cfg, bl, "--covariates", "covariates", blp_covariates);
      return cmd_blp(scores_path, blp_input, blp_schema, blp_covariates, out_dir);
    }
    if (re->parsed()) {
      merge_common(re);
      merge(cfg, re, "--in-dir", "in-dir", in_dir);
      return cmd_report(in_dir, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
