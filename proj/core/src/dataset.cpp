#include "causalkit/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "causalkit/csv.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

double weighted_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  return x.dot(w) / w.sum();
}

double weighted_var(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const double m = weighted_mean(x, w);
  return (w.array() * (x.array() - m).square()).sum() / w.sum();
}

}  // namespace

Schema Schema::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
  }
  Schema s;
  if (!j.contains("treatment") || !j.contains("outcome")) {
    throw ConfigError("schema: must name a treatment and an outcome column");
  }
  s.treatment = j.at("treatment").get<std::string>();
  s.outcome = j.at("outcome").get<std::string>();
  if (j.contains("weight") && !j.at("weight").is_null()) {
    s.weight = j.at("weight").get<std::string>();
  }
  if (j.contains("categorical")) s.categorical = j.at("categorical").get<std::vector<std::string>>();
  if (j.contains("ordinal")) s.ordinal = j.at("ordinal").get<std::vector<std::string>>();
  if (s.treatment == s.outcome) throw ConfigError("schema: treatment and outcome must differ");
  return s;
}

Schema Schema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void Dataset::validate() const {
  const long nn = n();
  if (nn < 1) throw DataError("dataset: empty sample");
  if (treatment.size() != nn || weights.size() != nn ||
      covariates.rows() != nn || missing_mask.rows() != nn) {
    throw DataError("dataset: vector lengths disagree");
  }
  if (missing_mask.cols() != covariates.cols()) {
    throw DataError("dataset: missing mask shape disagrees with covariates");
  }
  if (static_cast<int>(column_names.size()) != p()) {
    throw DataError("dataset: column name count disagrees with covariates");
  }
  for (long i = 0; i < nn; ++i) {
    const double w = treatment[i];
    if (w != 0.0 && w != 1.0) {
      throw DataError("dataset: treatment value " + format_double(w) + " at row " +
                      std::to_string(i + 1) + " is not 0/1");
    }
    if (!(weights[i] > 0.0)) {
      throw DataError("dataset: non-positive weight at row " + std::to_string(i + 1));
    }
  }
  for (const auto& [first, last] : onehot_groups) {
    for (long i = 0; i < nn; ++i) {
      if (missing_mask(i, first)) continue;
      const double sum = covariates.row(i).segment(first, last - first + 1).sum();
      if (std::abs(sum - 1.0) > 1e-9) {
        throw DataError("dataset: one-hot group starting at column " +
                        column_names[static_cast<std::size_t>(first)] + " sums to " +
                        format_double(sum) + " at row " + std::to_string(i + 1));
      }
    }
  }
}

int Dataset::column_index(const std::string& name) const {
  for (int j = 0; j < p(); ++j) {
    if (column_names[static_cast<std::size_t>(j)] == name) return j;
  }
  throw DataError("dataset: no covariate column named '" + name + "'");
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  const CsvTable table = read_csv(path);
  const long n = static_cast<long>(table.rows.size());
  if (n == 0) throw DataError("csv: no data rows in " + path);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw ConfigError("csv: missing column '" + name + "'");
    return static_cast<int>(it - table.header.begin());
  };

  const int w_col = find_col(schema.treatment);
  const int y_col = find_col(schema.outcome);
  const int u_col = schema.weight ? find_col(*schema.weight) : -1;

  const std::set<std::string> categorical(schema.categorical.begin(), schema.categorical.end());

  Dataset ds;
  ds.treatment.resize(n);
  ds.outcome.resize(n);
  ds.weights = Eigen::VectorXd::Ones(n);

  // Pass 1: fix the covariate layout (categoricals expand in place).
  struct ColPlan {
    int src;
    bool is_categorical;
    std::vector<std::string> levels;  // sorted; one output column per level
  };
  std::vector<ColPlan> plan;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c == w_col || c == y_col || c == u_col) continue;
    ColPlan cp{c, categorical.count(table.header[static_cast<std::size_t>(c)]) > 0, {}};
    if (cp.is_categorical) {
      std::set<std::string> levels;
      for (const auto& row : table.rows) {
        const auto& cell = row[static_cast<std::size_t>(c)];
        if (!cell.empty()) levels.insert(cell);
      }
      if (levels.empty()) {
        throw DataError("csv: categorical column '" + table.header[static_cast<std::size_t>(c)] +
                        "' has no observed values");
      }
      cp.levels.assign(levels.begin(), levels.end());
      bool all_numeric = true;
      for (const auto& l : cp.levels) {
        double v;
        if (!parse_double(l, v)) { all_numeric = false; break; }
      }
      if (all_numeric) {
        std::sort(cp.levels.begin(), cp.levels.end(), [](const std::string& a, const std::string& b) {
          double va, vb;
          parse_double(a, va);
          parse_double(b, vb);
          return va < vb;
        });
      }
    }
    plan.push_back(std::move(cp));
  }

  int p = 0;
  for (const auto& cp : plan) p += cp.is_categorical ? static_cast<int>(cp.levels.size()) : 1;

  ds.covariates.setConstant(n, p, kNaN);
  ds.missing_mask.setConstant(n, p, false);
  ds.column_names.reserve(static_cast<std::size_t>(p));
  for (const auto& cp : plan) {
    const auto& name = table.header[static_cast<std::size_t>(cp.src)];
    if (cp.is_categorical) {
      const int first = static_cast<int>(ds.column_names.size());
      for (const auto& level : cp.levels) ds.column_names.push_back(name + "=" + level);
      ds.onehot_groups.emplace_back(first, first + static_cast<int>(cp.levels.size()) - 1);
    } else {
      ds.column_names.push_back(name);
    }
  }

  // Pass 2: fill cells. CSV line numbers are 1-based with the header on line 1.
  for (long i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const long line = i + 2;

    const auto& w_cell = row[static_cast<std::size_t>(w_col)];
    double w;
    if (w_cell.empty() || !parse_double(w_cell, w) || (w != 0.0 && w != 1.0)) {
      throw DataError("csv: treatment value '" + w_cell + "' at line " + std::to_string(line) +
                      " is not 0/1");
    }
    ds.treatment[i] = w;

    const auto& y_cell = row[static_cast<std::size_t>(y_col)];
    double y;
    if (y_cell.empty() || !parse_double(y_cell, y)) {
      throw DataError("csv: outcome value '" + y_cell + "' at line " + std::to_string(line) +
                      " is not numeric");
    }
    ds.outcome[i] = y;

    if (u_col >= 0) {
      const auto& u_cell = row[static_cast<std::size_t>(u_col)];
      double u;
      if (u_cell.empty() || !parse_double(u_cell, u) || !(u > 0.0)) {
        throw DataError("csv: weight value '" + u_cell + "' at line " + std::to_string(line) +
                        " is not a positive number");
      }
      ds.weights[i] = u;
    }

    int out_j = 0;
    for (const auto& cp : plan) {
      const auto& cell = row[static_cast<std::size_t>(cp.src)];
      if (cp.is_categorical) {
        const int width = static_cast<int>(cp.levels.size());
        if (cell.empty()) {
          for (int k = 0; k < width; ++k) ds.missing_mask(i, out_j + k) = true;
        } else {
          auto it = std::find(cp.levels.begin(), cp.levels.end(), cell);
          if (it == cp.levels.end()) {
            throw DataError("csv: unseen categorical level '" + cell + "' at line " +
                            std::to_string(line));
          }
          for (int k = 0; k < width; ++k) ds.covariates(i, out_j + k) = 0.0;
          ds.covariates(i, out_j + static_cast<int>(it - cp.levels.begin())) = 1.0;
        }
        out_j += width;
      } else {
        if (cell.empty()) {
          ds.missing_mask(i, out_j) = true;
        } else {
          double v;
          if (!parse_double(cell, v)) {
            throw DataError("csv: value '" + cell + "' in column '" +
                            table.header[static_cast<std::size_t>(cp.src)] + "' at line " +
                            std::to_string(line) + " is not numeric");
          }
          ds.covariates(i, out_j) = v;
        }
        ++out_j;
      }
    }
  }

  ds.validate();
  return ds;
}

void save_csv(const std::string& path, const Dataset& ds, const Schema& schema) {
  // One-hot groups collapse back into a single categorical column (cell =
  // the active level), so saved files reload through the same schema.
  std::vector<int> group_of(static_cast<std::size_t>(ds.p()), -1);
  for (std::size_t g = 0; g < ds.onehot_groups.size(); ++g) {
    for (int j = ds.onehot_groups[g].first; j <= ds.onehot_groups[g].second; ++j) {
      group_of[static_cast<std::size_t>(j)] = static_cast<int>(g);
    }
  }
  auto split_name = [&](int j) {
    const auto& full = ds.column_names[static_cast<std::size_t>(j)];
    const auto pos = full.find('=');
    if (pos == std::string::npos) return std::pair<std::string, std::string>{full, ""};
    return std::pair<std::string, std::string>{full.substr(0, pos), full.substr(pos + 1)};
  };

  CsvTable table;
  table.header.push_back(schema.outcome);
  table.header.push_back(schema.treatment);
  if (schema.weight) table.header.push_back(*schema.weight);
  for (int j = 0; j < ds.p(); ++j) {
    const int g = group_of[static_cast<std::size_t>(j)];
    if (g >= 0) {
      if (j == ds.onehot_groups[static_cast<std::size_t>(g)].first) {
        table.header.push_back(split_name(j).first);
      }
    } else {
      table.header.push_back(ds.column_names[static_cast<std::size_t>(j)]);
    }
  }

  table.rows.reserve(static_cast<std::size_t>(ds.n()));
  for (long i = 0; i < ds.n(); ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(ds.outcome[i]));
    row.push_back(format_double(ds.treatment[i]));
    if (schema.weight) row.push_back(format_double(ds.weights[i]));
    for (int j = 0; j < ds.p(); ++j) {
      const int g = group_of[static_cast<std::size_t>(j)];
      if (g >= 0) {
        const auto [first, last] = ds.onehot_groups[static_cast<std::size_t>(g)];
        if (j != first) continue;
        if (ds.missing_mask(i, first)) {
          row.emplace_back();
        } else {
          std::string level;
          for (int k = first; k <= last; ++k) {
            if (ds.covariates(i, k) == 1.0) {
              level = split_name(k).second;
              break;
            }
          }
          row.push_back(level);
        }
      } else if (ds.missing_mask(i, j)) {
        row.emplace_back();
      } else {
        row.push_back(format_double(ds.covariates(i, j)));
      }
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

Eigen::VectorXd standardize(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
  if (values.size() != weights.size()) throw DataError("standardize: length mismatch");
  if (values.size() == 0) throw DataError("standardize: empty input");
  const double m = weighted_mean(values, weights);
  const double v = weighted_var(values, weights);
  if (v < 1e-12 * std::max(1.0, m * m)) {
    throw NumericError("standardize: degenerate variance (constant input)");
  }
  return (values.array() - m) / std::sqrt(v);
}

Eigen::VectorXd asset_index_pca(const Eigen::MatrixXd& indicators) {
  const long n = indicators.rows();
  const int k = static_cast<int>(indicators.cols());
  if (k < 2) throw DataError("asset_index_pca: need at least two indicator columns");

  Eigen::MatrixXd z(n, k);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd col = indicators.col(j);
    const double m = col.mean();
    const double v = (col.array() - m).square().sum() / static_cast<double>(n);
    if (v < 1e-12) {
      throw NumericError("asset_index_pca: indicator column " + std::to_string(j) +
                         " is constant");
    }
    z.col(j) = (col.array() - m) / std::sqrt(v);
  }

  const Eigen::MatrixXd c = (z.transpose() * z) / static_cast<double>(n);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(k, 1.0 / std::sqrt(static_cast<double>(k)));
  constexpr int kMaxIter = 10000;
  constexpr double kTol = 1e-9;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Eigen::VectorXd next = c * v;
    const double norm = next.norm();
    if (norm == 0.0) throw NumericError("asset_index_pca: zero eigenvector iterate");
    next /= norm;
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (delta < kTol) break;
  }

  Eigen::VectorXd scores = z * v;
  const Eigen::VectorXd row_sums = indicators.rowwise().sum();
  const double cov = (scores.array() - scores.mean())
                         .cwiseProduct(row_sums.array() - row_sums.mean())
                         .sum();
  if (cov < 0.0) scores = -scores;
  return standardize(scores, ones);
}

Eigen::VectorXd intergenerational_outcome(const Eigen::VectorXd& child_scores,
                                          const Eigen::VectorXd& parent_scores) {
  if (child_scores.size() != parent_scores.size()) {
    throw DataError("intergenerational_outcome: length mismatch");
  }
  return child_scores - parent_scores;
}

const std::array<double, 4> kDefaultCohortUpperAges = {32.0, 44.0, 56.0, 68.0};

int age_cohort(double age, const std::array<double, 4>& upper_ages) {
  for (int b = 0; b < 4; ++b) {
    if (age <= upper_ages[static_cast<std::size_t>(b)]) return b + 1;
  }
  return 5;
}

namespace {

// Least squares with silent removal of linearly dependent design columns;
// used only inside imputation, where the design is machine-made and a
// reduced fit is the right behavior (the public OLS errors instead).
struct ReducedLs {
  Eigen::VectorXd beta;    // aligned with kept columns
  std::vector<int> kept;
  double resid_sd = 0.0;
};

ReducedLs reduced_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  ReducedLs out;
  const auto& perm = qr.colsPermutation().indices();
  out.kept.reserve(static_cast<std::size_t>(rank));
  for (int i = 0; i < rank; ++i) out.kept.push_back(perm[i]);
  std::sort(out.kept.begin(), out.kept.end());
  Eigen::MatrixXd xr(x.rows(), rank);
  for (int i = 0; i < rank; ++i) xr.col(i) = x.col(out.kept[static_cast<std::size_t>(i)]);
  out.beta = xr.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - xr * out.beta;
  const long dof = x.rows() - rank;
  out.resid_sd = dof > 0 ? std::sqrt(resid.squaredNorm() / static_cast<double>(dof)) : 0.0;
  return out;
}

bool column_is_binary(const Dataset& ds, int j) {
  for (long i = 0; i < ds.n(); ++i) {
    if (ds.missing_mask(i, j)) continue;
    const double v = ds.covariates(i, j);
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

}  // namespace

std::vector<Dataset> impute(const Dataset& ds, int m, std::uint64_t seed) {
  if (m < 1) throw DataError("impute: m must be positive");
  ds.validate();
  const long n = ds.n();
  const int p = ds.p();

  for (int j = 0; j < p; ++j) {
    bool any_observed = false;
    for (long i = 0; i < n; ++i) {
      if (!ds.missing_mask(i, j)) { any_observed = true; break; }
    }
    if (!any_observed) {
      throw DataError("impute: column '" + ds.column_names[static_cast<std::size_t>(j)] +
                      "' is fully missing");
    }
  }

  std::vector<int> complete_cols;
  for (int j = 0; j < p; ++j) {
    bool complete = true;
    for (long i = 0; i < n; ++i) {
      if (ds.missing_mask(i, j)) { complete = false; break; }
    }
    if (complete) complete_cols.push_back(j);
  }

  // Targets: standalone incomplete columns, and incomplete one-hot groups
  // imputed jointly (argmax keeps the group summing to 1).
  std::vector<bool> in_group(static_cast<std::size_t>(p), false);
  for (const auto& [first, last] : ds.onehot_groups) {
    for (int j = first; j <= last; ++j) in_group[static_cast<std::size_t>(j)] = true;
  }
  struct Target {
    std::vector<int> cols;  // one entry for singles, the full group otherwise
  };
  std::vector<Target> targets;
  for (int j = 0; j < p; ++j) {
    if (in_group[static_cast<std::size_t>(j)]) continue;
    bool incomplete = false;
    for (long i = 0; i < n; ++i) {
      if (ds.missing_mask(i, j)) { incomplete = true; break; }
    }
    if (incomplete) targets.push_back({{j}});
  }
  for (const auto& [first, last] : ds.onehot_groups) {
    bool incomplete = false;
    for (long i = 0; i < n && !incomplete; ++i) incomplete = ds.missing_mask(i, first);
    if (incomplete) {
      Target t;
      for (int j = first; j <= last; ++j) t.cols.push_back(j);
      targets.push_back(std::move(t));
    }
  }

  // Design: intercept plus the complete columns (dependent ones dropped
  // inside the reduced solver).
  Eigen::MatrixXd design(n, 1 + static_cast<int>(complete_cols.size()));
  design.col(0).setOnes();
  for (std::size_t c = 0; c < complete_cols.size(); ++c) {
    design.col(1 + static_cast<int>(c)) = ds.covariates.col(complete_cols[c]);
  }

  std::vector<Dataset> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int imp = 0; imp < m; ++imp) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(imp));
    Dataset filled = ds;
    for (const auto& target : targets) {
      const int probe = target.cols.front();
      std::vector<long> obs_rows, mis_rows;
      for (long i = 0; i < n; ++i) {
        (ds.missing_mask(i, probe) ? mis_rows : obs_rows).push_back(i);
      }

      // One bootstrap draw of the observed rows per (imputation, target):
      // the refitted coefficients carry parameter uncertainty into the draw.
      const long nb = static_cast<long>(obs_rows.size());
      Eigen::MatrixXd xb(nb, design.cols());
      std::vector<long> boot(static_cast<std::size_t>(nb));
      for (long b = 0; b < nb; ++b) {
        boot[static_cast<std::size_t>(b)] =
            obs_rows[static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(nb)))];
        xb.row(b) = design.row(boot[static_cast<std::size_t>(b)]);
      }

      if (target.cols.size() == 1) {
        const int j = target.cols.front();
        Eigen::VectorXd yb(nb);
        for (long b = 0; b < nb; ++b) yb[b] = ds.covariates(boot[static_cast<std::size_t>(b)], j);
        const ReducedLs fit = reduced_least_squares(xb, yb);
        const bool binary = column_is_binary(ds, j);
        for (long r : mis_rows) {
          double pred = 0.0;
          for (std::size_t c = 0; c < fit.kept.size(); ++c) {
            pred += design(r, fit.kept[c]) * fit.beta[static_cast<int>(c)];
          }
          double value = pred + fit.resid_sd * rng.normal();
          if (binary) value = value >= 0.5 ? 1.0 : 0.0;
          filled.covariates(r, j) = value;
          filled.missing_mask(r, j) = false;
        }
      } else {
        // Group: score every level, assign the argmax.
        std::vector<ReducedLs> fits;
        fits.reserve(target.cols.size());
        for (int j : target.cols) {
          Eigen::VectorXd yb(nb);
          for (long b = 0; b < nb; ++b) yb[b] = ds.covariates(boot[static_cast<std::size_t>(b)], j);
          fits.push_back(reduced_least_squares(xb, yb));
        }
        for (long r : mis_rows) {
          int best = 0;
          double best_score = -std::numeric_limits<double>::infinity();
          for (std::size_t g = 0; g < target.cols.size(); ++g) {
            double pred = 0.0;
            for (std::size_t c = 0; c < fits[g].kept.size(); ++c) {
              pred += design(r, fits[g].kept[c]) * fits[g].beta[static_cast<int>(c)];
            }
            const double score = pred + fits[g].resid_sd * rng.normal();
            if (score > best_score) {
              best_score = score;
              best = static_cast<int>(g);
            }
          }
          for (std::size_t g = 0; g < target.cols.size(); ++g) {
            filled.covariates(r, target.cols[g]) = g == static_cast<std::size_t>(best) ? 1.0 : 0.0;
            filled.missing_mask(r, target.cols[g]) = false;
          }
        }
      }
    }
    filled.missing_mask.setConstant(n, p, false);
    out.push_back(std::move(filled));
  }
  return out;
}

EstimateReport pool_estimates(const std::vector<std::pair<double, double>>& per_imputation,
                              Estimand estimand, const std::string& estimator) {
  const int m = static_cast<int>(per_imputation.size());
  if (m < 2) throw DataError("pool_estimates: need at least two imputations");
  double mean = 0.0, within = 0.0;
  for (const auto& [est, se] : per_imputation) {
    mean += est;
    within += se * se;
  }
  mean /= m;
  within /= m;
  double between = 0.0;
  for (const auto& [est, se] : per_imputation) between += (est - mean) * (est - mean);
  between /= (m - 1);
  const double total = within + (1.0 + 1.0 / m) * between;
  return make_report(estimand, estimator, mean, std::sqrt(total), m);
}

double BalanceTable::max_smd_unweighted() const {
  double mx = 0.0;
  for (const auto& r : rows) mx = std::max(mx, r.smd_unweighted);
  return mx;
}

double BalanceTable::max_smd_weighted() const {
  double mx = 0.0;
  for (const auto& r : rows) mx = std::max(mx, r.smd_weighted);
  return mx;
}

void BalanceTable::write_csv(const std::string& path) const {
  CsvTable t;
  t.header = {"covariate", "smd_unweighted", "smd_weighted", "flag"};
  for (const auto& r : rows) {
    t.rows.push_back({r.name, format_double(r.smd_unweighted), format_double(r.smd_weighted),
                      r.flagged ? "1" : "0"});
  }
  causalkit::write_csv(path, t);
}

namespace {

double smd_one(const Dataset& ds, int j, const Eigen::VectorXd& w, BalanceRow* moments) {
  double s1 = 0.0, s0 = 0.0, m1 = 0.0, m0 = 0.0;
  for (long i = 0; i < ds.n(); ++i) {
    if (ds.missing_mask(i, j)) continue;
    if (ds.treatment[i] == 1.0) {
      s1 += w[i];
      m1 += w[i] * ds.covariates(i, j);
    } else {
      s0 += w[i];
      m0 += w[i] * ds.covariates(i, j);
    }
  }
  if (s1 <= 0.0 || s0 <= 0.0) throw DataError("balance: an arm has no observed units");
  m1 /= s1;
  m0 /= s0;
  double v1 = 0.0, v0 = 0.0;
  for (long i = 0; i < ds.n(); ++i) {
    if (ds.missing_mask(i, j)) continue;
    const double d = ds.covariates(i, j) - (ds.treatment[i] == 1.0 ? m1 : m0);
    if (ds.treatment[i] == 1.0) v1 += w[i] * d * d;
    else v0 += w[i] * d * d;
  }
  v1 /= s1;
  v0 /= s0;
  if (moments != nullptr) {
    moments->mean_treated = m1;
    moments->mean_control = m0;
    moments->var_treated = v1;
    moments->var_control = v0;
  }
  const double denom = std::sqrt((v1 + v0) / 2.0);
  const double diff = std::abs(m1 - m0);
  if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / denom;
}

}  // namespace

BalanceTable balance(const Dataset& ds, const Eigen::VectorXd& unit_weights) {
  if (unit_weights.size() != ds.n()) throw DataError("balance: weight length mismatch");
  if ((ds.treatment.array() == 1.0).count() == 0 || (ds.treatment.array() == 0.0).count() == 0) {
    throw DataError("balance: both treatment arms must be non-empty");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.n());
  BalanceTable table;
  table.rows.reserve(static_cast<std::size_t>(ds.p()));
  for (int j = 0; j < ds.p(); ++j) {
    BalanceRow row;
    row.name = ds.column_names[static_cast<std::size_t>(j)];
    row.smd_unweighted = smd_one(ds, j, ones, &row);
    row.smd_weighted = smd_one(ds, j, unit_weights, nullptr);
    row.flagged = row.smd_weighted > 0.1;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace causalkit
