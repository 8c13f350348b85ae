#include "causalkit/causal_forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "causalkit/errors.hpp"
#include "causalkit/linear_models.hpp"
#include "causalkit/parallel.hpp"
#include "causalkit/rng.hpp"
#include "tree_split_util.hpp"

namespace causalkit {

namespace {

int auto_mtry(int p, int requested) {
  if (requested > 0) return std::min(requested, p);
  return std::min(p, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p)) + 20.0)));
}

struct CfGrowData {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y_res;
  const Eigen::VectorXd& w_res;
  const Eigen::VectorXd& w01;  // original treatment, for leaf feasibility
  const Eigen::VectorXd& u;
  CfParams params;
  int mtry = 0;
};

struct CfGrower {
  const CfGrowData& d;
  std::vector<CfNode> nodes;
  std::vector<int> split_arena;
  std::vector<int> est_arena;
  std::vector<double> rho;  // aligned with split_arena positions

  struct Pending {
    int node_id;
    int sb, se, eb, ee;
  };

  explicit CfGrower(const CfGrowData& data) : d(data) {}

  void grow(const std::vector<int>& split_ids, const std::vector<int>& est_ids, Rng& rng) {
    split_arena = split_ids;
    est_arena = est_ids;
    rho.assign(split_arena.size(), 0.0);
    nodes.clear();
    nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, 0, static_cast<int>(split_arena.size()), 0,
                     static_cast<int>(est_arena.size())});
    while (!stack.empty()) {
      const Pending cur = stack.back();
      stack.pop_back();
      process(cur, rng, stack);
    }
  }

  void process(const Pending& cur, Rng& rng, std::vector<Pending>& stack) {
    CfNode& node = nodes[static_cast<std::size_t>(cur.node_id)];
    const int m = cur.se - cur.sb;

    double s_u = 0.0, s_uwy = 0.0, s_uww = 0.0;
    int n_t = 0, n_c = 0;
    for (int k = cur.sb; k < cur.se; ++k) {
      const int i = split_arena[static_cast<std::size_t>(k)];
      s_u += d.u[i];
      s_uwy += d.u[i] * d.w_res[i] * d.y_res[i];
      s_uww += d.u[i] * d.w_res[i] * d.w_res[i];
      (d.w01[i] == 1.0 ? n_t : n_c)++;
    }
    if (node.depth >= d.params.max_depth) return;
    const int min_t = d.params.min_treated, min_c = d.params.min_control;
    if (n_t < 2 * min_t || n_c < 2 * min_c) return;
    if (s_uww <= 0.0) return;

    // Gradient-style pseudo-outcomes around the node slope; their node mean
    // is zero, so any spread across children is gain.
    const double tau_node = s_uwy / s_uww;
    const double mean_ww = s_uww / s_u;
    for (int k = cur.sb; k < cur.se; ++k) {
      const int i = split_arena[static_cast<std::size_t>(k)];
      rho[static_cast<std::size_t>(k)] =
          d.w_res[i] * (d.y_res[i] - tau_node * d.w_res[i]) / mean_ww;
    }

    double best_crit = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    // mtry feature draw, searched in ascending index order so gain ties
    // break deterministically.
    std::vector<int> features(static_cast<std::size_t>(d.x.cols()));
    std::iota(features.begin(), features.end(), 0);
    const int mtry = std::min(d.mtry, static_cast<int>(features.size()));
    for (int j = 0; j < mtry; ++j) {
      const std::size_t pick =
          static_cast<std::size_t>(j) +
          static_cast<std::size_t>(rng.uniform_int(features.size() - static_cast<std::size_t>(j)));
      std::swap(features[static_cast<std::size_t>(j)], features[pick]);
    }
    features.resize(static_cast<std::size_t>(mtry));
    std::sort(features.begin(), features.end());

    std::vector<int> order;
    std::vector<double> values;
    std::vector<double> est_sorted;
    std::vector<int> est_prefix_t, est_prefix_c;

    for (const int f : features) {
      order.resize(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), cur.sb);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return d.x(split_arena[static_cast<std::size_t>(a)], f) <
               d.x(split_arena[static_cast<std::size_t>(b)], f);
      });
      values.resize(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) {
        values[static_cast<std::size_t>(k)] =
            d.x(split_arena[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])], f);
      }
      const std::vector<int> cand = detail::candidate_boundaries(values, d.params.max_candidates);
      if (cand.empty()) continue;

      const int me = cur.ee - cur.eb;
      std::vector<std::pair<double, int>> est_pairs(static_cast<std::size_t>(me));
      for (int k = 0; k < me; ++k) {
        const int i = est_arena[static_cast<std::size_t>(cur.eb + k)];
        est_pairs[static_cast<std::size_t>(k)] = {d.x(i, f), d.w01[i] == 1.0 ? 1 : 0};
      }
      std::stable_sort(est_pairs.begin(), est_pairs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      est_sorted.resize(static_cast<std::size_t>(me));
      est_prefix_t.assign(static_cast<std::size_t>(me + 1), 0);
      est_prefix_c.assign(static_cast<std::size_t>(me + 1), 0);
      for (int k = 0; k < me; ++k) {
        est_sorted[static_cast<std::size_t>(k)] = est_pairs[static_cast<std::size_t>(k)].first;
        est_prefix_t[static_cast<std::size_t>(k + 1)] =
            est_prefix_t[static_cast<std::size_t>(k)] + est_pairs[static_cast<std::size_t>(k)].second;
        est_prefix_c[static_cast<std::size_t>(k + 1)] = est_prefix_c[static_cast<std::size_t>(k)] +
                                                        1 -
                                                        est_pairs[static_cast<std::size_t>(k)].second;
      }
      const int est_total_t = est_prefix_t[static_cast<std::size_t>(me)];
      const int est_total_c = est_prefix_c[static_cast<std::size_t>(me)];

      double lu = 0.0, lur = 0.0;
      int ln_t = 0, ln_c = 0;
      int pos = 0;
      for (const int boundary : cand) {
        for (; pos <= boundary; ++pos) {
          const int k = order[static_cast<std::size_t>(pos)];
          const int i = split_arena[static_cast<std::size_t>(k)];
          lu += d.u[i];
          lur += d.u[i] * rho[static_cast<std::size_t>(k)];
          (d.w01[i] == 1.0 ? ln_t : ln_c)++;
        }
        if (ln_t < min_t || ln_c < min_c) continue;
        if (n_t - ln_t < min_t || n_c - ln_c < min_c) continue;

        const double threshold =
            0.5 * (values[static_cast<std::size_t>(boundary)] +
                   values[static_cast<std::size_t>(boundary + 1)]);
        const auto it = std::upper_bound(est_sorted.begin(), est_sorted.end(), threshold);
        const int e_left = static_cast<int>(it - est_sorted.begin());
        const int el_t = est_prefix_t[static_cast<std::size_t>(e_left)];
        const int el_c = est_prefix_c[static_cast<std::size_t>(e_left)];
        if (el_t < min_t || el_c < min_c) continue;
        if (est_total_t - el_t < min_t || est_total_c - el_c < min_c) continue;

        double total_ur = 0.0;  // node sum of u * rho is zero up to round-off
        const double ru = s_u - lu, rur = total_ur - lur;
        const double crit = lur * lur / lu + rur * rur / ru;
        const bool better =
            crit > best_crit ||
            (crit == best_crit && best_feature >= 0 &&
             (f < best_feature || (f == best_feature && threshold < best_threshold)));
        if (better && crit > 0.0) {
          best_crit = crit;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return;

    auto below = [&](int i) { return d.x(i, best_feature) <= best_threshold; };
    // rho is aligned with arena positions; permute it alongside.
    {
      std::vector<int> idx(static_cast<std::size_t>(m));
      std::iota(idx.begin(), idx.end(), cur.sb);
      std::stable_partition(idx.begin(), idx.end(), [&](int k) {
        return below(split_arena[static_cast<std::size_t>(k)]);
      });
      std::vector<int> new_units(static_cast<std::size_t>(m));
      std::vector<double> new_rho(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) {
        new_units[static_cast<std::size_t>(k)] =
            split_arena[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
        new_rho[static_cast<std::size_t>(k)] = rho[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
      }
      std::copy(new_units.begin(), new_units.end(), split_arena.begin() + cur.sb);
      std::copy(new_rho.begin(), new_rho.end(), rho.begin() + cur.sb);
    }
    int smid = cur.sb;
    while (smid < cur.se && below(split_arena[static_cast<std::size_t>(smid)])) ++smid;
    const int emid = static_cast<int>(
        std::stable_partition(est_arena.begin() + cur.eb, est_arena.begin() + cur.ee, below) -
        est_arena.begin());

    const int left_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int right_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    CfNode& parent = nodes[static_cast<std::size_t>(cur.node_id)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_id;
    parent.right = right_id;
    nodes[static_cast<std::size_t>(left_id)].parent = cur.node_id;
    nodes[static_cast<std::size_t>(left_id)].depth = parent.depth + 1;
    nodes[static_cast<std::size_t>(right_id)].parent = cur.node_id;
    nodes[static_cast<std::size_t>(right_id)].depth = parent.depth + 1;

    stack.push_back({right_id, smid, cur.se, emid, cur.ee});
    stack.push_back({left_id, cur.sb, smid, cur.eb, emid});
  }
};

CfTree grow_cf_tree(const CfGrowData& data, std::vector<int> subsample, Rng rng,
                    const Eigen::VectorXd& u, const Eigen::VectorXd& w_res,
                    const Eigen::VectorXd& y_res, const Eigen::MatrixXd& x) {
  CfTree tree;
  tree.split_size = static_cast<int>(subsample.size() / 2);
  std::vector<int> split_ids(subsample.begin(), subsample.begin() + tree.split_size);
  std::vector<int> est_ids(subsample.begin() + tree.split_size, subsample.end());
  tree.subsample = std::move(subsample);

  CfGrower grower(data);
  grower.grow(split_ids, est_ids, rng);
  tree.nodes = std::move(grower.nodes);

  // Estimation-half aggregates at every node on each unit's root path.
  for (int i : est_ids) {
    int id = 0;
    for (;;) {
      CfNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.sum_u += u[i];
      node.mean_wy += u[i] * w_res[i] * y_res[i];
      node.mean_ww += u[i] * w_res[i] * w_res[i];
      node.est_count += 1;
      if (node.feature < 0) break;
      id = x(i, node.feature) <= node.threshold ? node.left : node.right;
    }
  }
  for (auto& node : tree.nodes) {
    if (node.sum_u > 0.0) {
      node.mean_wy /= node.sum_u;
      node.mean_ww /= node.sum_u;
    }
  }
  return tree;
}

// Numerator/denominator contribution of one tree at x, walking up from the
// leaf while the node carries no estimation units.
bool tree_contribution(const CfTree& tree, const Eigen::RowVectorXd& x, double& num,
                       double& den) {
  int id = tree.leaf_for(x);
  while (id >= 0 && tree.nodes[static_cast<std::size_t>(id)].est_count == 0) {
    id = tree.nodes[static_cast<std::size_t>(id)].parent;
  }
  if (id < 0) return false;
  num += tree.nodes[static_cast<std::size_t>(id)].mean_wy;
  den += tree.nodes[static_cast<std::size_t>(id)].mean_ww;
  return true;
}

}  // namespace

int CfTree::leaf_for(const Eigen::RowVectorXd& x) const {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const CfNode& node = nodes[static_cast<std::size_t>(id)];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return id;
}

CausalForest cf_fit_residualized(const Dataset& ds, const Eigen::VectorXd& y_res,
                                 const Eigen::VectorXd& w_res, const CfParams& params,
                                 std::uint64_t seed) {
  ds.validate();
  if (ds.has_missing()) throw DataError("cf_fit: impute missing values first");
  const long n = ds.n();
  if (y_res.size() != n || w_res.size() != n) throw DataError("cf_fit: residual length mismatch");
  if (params.min_treated < 1 || params.min_control < 1) {
    throw DataError("cf_fit: minimum leaf counts must be at least 1");
  }
  if ((ds.treatment.array() == 1.0).count() == 0 || (ds.treatment.array() == 0.0).count() == 0) {
    throw DataError("cf_fit: both treatment arms must be present");
  }

  CausalForest forest;
  forest.params = params;
  forest.params.mtry = auto_mtry(ds.p(), params.mtry);
  forest.data = ds;
  forest.y_res = y_res;
  forest.w_res = w_res;

  const int subsample_size =
      std::max(4, static_cast<int>(std::floor(params.subsample_fraction * static_cast<double>(n))));

  CfGrowData grow_data{ds.covariates, forest.y_res, forest.w_res,
                       ds.treatment,  ds.weights,   forest.params,
                       forest.params.mtry};

  forest.trees.resize(static_cast<std::size_t>(params.num_trees));
  parallel_for(0, params.num_trees, [&](int b) {
    Rng sub_rng = Rng::derive(seed, 0x8000000000000000ULL | static_cast<std::uint64_t>(b));
    std::vector<int> subsample =
        sub_rng.sample_without_replacement(static_cast<int>(n), subsample_size);
    forest.trees[static_cast<std::size_t>(b)] =
        grow_cf_tree(grow_data, std::move(subsample),
                     Rng::derive(seed, static_cast<std::uint64_t>(b)), ds.weights, forest.w_res,
                     forest.y_res, ds.covariates);
  });

  // In-bag bitmaps for the out-of-bag predictions.
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
  forest.in_bag.assign(forest.trees.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t b = 0; b < forest.trees.size(); ++b) {
    for (int i : forest.trees[b].subsample) {
      forest.in_bag[b][static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64);
    }
  }

  forest.oob_tau.resize(n);
  std::vector<std::uint8_t> uncovered(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> fallback(static_cast<std::size_t>(n), 0);
  parallel_for(0, static_cast<int>(n), [&](int i) {
    double num = 0.0, den = 0.0;
    int cnt = 0;
    for (std::size_t b = 0; b < forest.trees.size(); ++b) {
      if (forest.in_bag[b][static_cast<std::size_t>(i / 64)] >> (i % 64) & 1ULL) continue;
      if (tree_contribution(forest.trees[b], ds.covariates.row(i), num, den)) ++cnt;
    }
    if (cnt == 0) {
      uncovered[static_cast<std::size_t>(i)] = 1;
      num = den = 0.0;
      for (const auto& tree : forest.trees) tree_contribution(tree, ds.covariates.row(i), num, den);
    }
    if (den < 1e-12) {
      // All-one-arm neighborhood: fall back to the root aggregates.
      fallback[static_cast<std::size_t>(i)] = 1;
      num = den = 0.0;
      for (const auto& tree : forest.trees) {
        num += tree.nodes[0].mean_wy;
        den += tree.nodes[0].mean_ww;
      }
    }
    forest.oob_tau[i] = den > 0.0 ? num / den : 0.0;
  });
  for (long i = 0; i < n; ++i) {
    forest.oob_uncovered += uncovered[static_cast<std::size_t>(i)];
    forest.denominator_fallbacks += fallback[static_cast<std::size_t>(i)];
  }
  return forest;
}

CausalForest cf_fit(const Dataset& ds, const CfParams& params, std::uint64_t seed) {
  ds.validate();
  if (ds.has_missing()) throw DataError("cf_fit: impute missing values first");

  RfParams stage1;
  stage1.num_trees = params.stage1_trees;
  stage1.min_leaf = 5;
  stage1.subsample_fraction = 0.5;
  stage1.mtry = 0;
  stage1.seed = Rng::derive(seed, 0x6d686174ULL).next_u64();  // m-hat stream
  const RegressionForest m_forest = rf_fit(ds.covariates, ds.outcome, stage1, ds.weights);

  RfParams stage1e = stage1;
  stage1e.seed = Rng::derive(seed, 0x65686174ULL).next_u64();  // e-hat stream
  const RegressionForest e_forest = rf_fit(ds.covariates, ds.treatment, stage1e, ds.weights);

  const Eigen::VectorXd m_hat = m_forest.oob_predictions;
  const Eigen::VectorXd e_hat =
      e_forest.oob_predictions.cwiseMax(params.clip.lo).cwiseMin(params.clip.hi);

  CausalForest forest = cf_fit_residualized(ds, ds.outcome - m_hat, ds.treatment - e_hat,
                                            params, seed);
  forest.nuisance = NuisanceEstimates::from_marginals(m_hat, e_hat, forest.oob_tau, params.clip);
  forest.scores = aipw_scores(ds, forest.nuisance, forest.oob_tau);
  return forest;
}

Eigen::VectorXd cf_predict(const CausalForest& forest, const Eigen::MatrixXd& x_query) {
  Eigen::VectorXd out(x_query.rows());
  parallel_for(0, static_cast<int>(x_query.rows()), [&](int i) {
    double num = 0.0, den = 0.0;
    for (const auto& tree : forest.trees) tree_contribution(tree, x_query.row(i), num, den);
    if (den < 1e-12) {
      num = den = 0.0;
      for (const auto& tree : forest.trees) {
        num += tree.nodes[0].mean_wy;
        den += tree.nodes[0].mean_ww;
      }
    }
    out[i] = den > 0.0 ? num / den : 0.0;
  });
  return out;
}

Eigen::VectorXd cf_forest_weights(const CausalForest& forest, const Eigen::RowVectorXd& x) {
  const long n = forest.data.n();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  const double b_total = static_cast<double>(forest.trees.size());
  for (const auto& tree : forest.trees) {
    const int leaf = tree.leaf_for(x);
    const CfNode& node = tree.nodes[static_cast<std::size_t>(leaf)];
    if (node.est_count == 0 || node.sum_u <= 0.0) continue;
    for (int k = tree.split_size; k < static_cast<int>(tree.subsample.size()); ++k) {
      const int i = tree.subsample[static_cast<std::size_t>(k)];
      if (tree.leaf_for(forest.data.covariates.row(i)) == leaf) {
        alpha[i] += forest.data.weights[i] / (node.sum_u * b_total);
      }
    }
  }
  return alpha;
}

EstimateReport cf_ate(const CausalForest& forest, AteTarget target) {
  if (forest.scores.size() != forest.data.n()) {
    throw DataError("cf_ate: forest carries no nuisance scores (residualized-only fit?)");
  }
  if (target == AteTarget::All) {
    const double est = weighted_mean(forest.scores, forest.data.weights);
    const double se =
        weighted_sd(forest.scores, forest.data.weights) / std::sqrt(effective_n(forest.data.weights));
    return make_report(Estimand::Ate, "causal-forest-aipw", est, se, forest.data.n());
  }
  EstimateReport att = aipw_ate(forest.data, forest.nuisance, AteTarget::Treated);
  return make_report(Estimand::Att, "causal-forest-aipw", att.estimate, att.se, att.n);
}

Eigen::VectorXd cf_variable_importance(const CausalForest& forest) {
  Eigen::VectorXd score = Eigen::VectorXd::Zero(forest.data.p());
  for (const auto& tree : forest.trees) {
    for (const auto& node : tree.nodes) {
      if (node.feature < 0 || node.depth > 4) continue;
      score[node.feature] += std::pow(0.5, node.depth);
    }
  }
  const double total = score.sum();
  if (total > 0.0) score /= total;
  return score;
}

std::vector<int> select_above_mean(const Eigen::VectorXd& importance) {
  const double mean = importance.mean();
  std::vector<int> kept;
  for (long j = 0; j < importance.size(); ++j) {
    if (importance[j] > mean) kept.push_back(static_cast<int>(j));
  }
  return kept;
}

std::vector<SubgroupEffect> cf_subgroup_cate(const CausalForest& forest,
                                             const std::vector<std::string>& group_labels) {
  const long n = forest.data.n();
  if (static_cast<long>(group_labels.size()) != n) {
    throw DataError("cf_subgroup_cate: label length mismatch");
  }
  std::map<std::string, std::vector<long>> groups;
  for (long i = 0; i < n; ++i) groups[group_labels[static_cast<std::size_t>(i)]].push_back(i);

  std::vector<SubgroupEffect> out;
  for (const auto& [label, rows] : groups) {
    SubgroupEffect effect;
    effect.label = label;
    bool has_t = false, has_c = false;
    for (long i : rows) (forest.data.treatment[i] == 1.0 ? has_t : has_c) = true;
    if (!has_t || !has_c) {
      effect.missing_reason = "single-arm group";
      out.push_back(std::move(effect));
      continue;
    }
    Eigen::VectorXd s(static_cast<long>(rows.size())), u(static_cast<long>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      s[static_cast<long>(k)] = forest.scores[rows[k]];
      u[static_cast<long>(k)] = forest.data.weights[rows[k]];
    }
    const double est = weighted_mean(s, u);
    const double se = weighted_sd(s, u) / std::sqrt(effective_n(u));
    effect.report = make_report(Estimand::CateGroup, "aipw-subgroup", est, se,
                                static_cast<long>(rows.size()));
    out.push_back(std::move(effect));
  }
  return out;
}

namespace {

// R type-7 quantile on sorted values.
double quantile_type7(const std::vector<double>& sorted, double prob) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = (static_cast<double>(m) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, m - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

RankAteResult rank_average_effects(const Eigen::VectorXd& scores, const Eigen::VectorXd& tau_hat,
                                   const Eigen::VectorXd& weights, int num_rankings) {
  const long n = scores.size();
  if (num_rankings < 2) throw DataError("rank_average_effects: need at least 2 rankings");
  if (tau_hat.size() != n || weights.size() != n) {
    throw DataError("rank_average_effects: length mismatch");
  }

  constexpr int kFolds = 5;
  std::vector<int> bin(static_cast<std::size_t>(n), -1);
  bool degenerate = false;

  // Contiguous fold blocks; each fold ranks its own units by the quantiles
  // of its own out-of-bag predictions.
  for (int f = 0; f < kFolds && !degenerate; ++f) {
    const long lo = f * n / kFolds;
    const long hi = (f + 1) * n / kFolds;
    if (hi <= lo) continue;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(hi - lo));
    for (long i = lo; i < hi; ++i) vals.push_back(tau_hat[i]);
    std::sort(vals.begin(), vals.end());

    std::vector<double> breaks;
    for (int j = 0; j <= num_rankings; ++j) {
      breaks.push_back(quantile_type7(vals, static_cast<double>(j) / num_rankings));
    }
    bool unique = true;
    for (std::size_t j = 1; j < breaks.size(); ++j) {
      if (!(breaks[j] > breaks[j - 1])) { unique = false; break; }
    }
    if (!unique) {
      degenerate = true;
      break;
    }
    for (long i = lo; i < hi; ++i) {
      const double v = tau_hat[i];
      int b = num_rankings - 1;
      for (int j = 1; j <= num_rankings; ++j) {
        if (v <= breaks[static_cast<std::size_t>(j)]) { b = j - 1; break; }
      }
      bin[static_cast<std::size_t>(i)] = b;
    }
  }

  RankAteResult result;
  if (!degenerate) {
    std::vector<long> bin_count(static_cast<std::size_t>(num_rankings), 0);
    for (long i = 0; i < n; ++i) ++bin_count[static_cast<std::size_t>(bin[static_cast<std::size_t>(i)])];
    for (long c : bin_count) degenerate |= (c == 0);
  }
  if (degenerate) {
    result.degenerate = true;
    const double est = weighted_mean(scores, weights);
    const double se =
        weighted_sd(scores, weights) / std::sqrt(effective_n(weights));
    result.per_rank.push_back(make_report(Estimand::CateGroup, "aipw-rank", est, se, n));
    return result;
  }

  Eigen::MatrixXd dummies = Eigen::MatrixXd::Zero(n, num_rankings);
  for (long i = 0; i < n; ++i) dummies(i, bin[static_cast<std::size_t>(i)]) = 1.0;
  const LinearFit fit =
      ols_fit(dummies, scores, weights, RobustVariant::HC2);
  const Eigen::VectorXd se = fit.se();
  for (int b = 0; b < num_rankings; ++b) {
    long count = 0;
    for (long i = 0; i < n; ++i) count += bin[static_cast<std::size_t>(i)] == b ? 1 : 0;
    result.per_rank.push_back(
        make_report(Estimand::CateGroup, "aipw-rank", fit.coefficients[b], se[b], count));
  }
  return result;
}

RankAteResult cf_rank_ate(const CausalForest& forest, int num_rankings) {
  if (forest.scores.size() != forest.data.n()) {
    throw DataError("cf_rank_ate: forest carries no scores");
  }
  return rank_average_effects(forest.scores, forest.oob_tau, forest.data.weights, num_rankings);
}

double CalibrationResult::p_differential() const {
  if (!differential_defined) return 1.0;
  return 0.5 * std::erfc(t_differential() / std::numbers::sqrt2);
}

CalibrationResult calibration_test(const Eigen::VectorXd& scores, const Eigen::VectorXd& tau_hat,
                                   const Eigen::VectorXd& weights) {
  const long n = scores.size();
  if (tau_hat.size() != n || weights.size() != n) {
    throw DataError("calibration_test: length mismatch");
  }
  const double tau_mean = weighted_mean(tau_hat, weights);
  const Eigen::VectorXd demeaned = tau_hat.array() - tau_mean;
  const double var = weighted_sd(demeaned, weights);

  CalibrationResult result;
  if (var * var < 1e-16) {
    result.differential_defined = false;
    Eigen::MatrixXd x(n, 1);
    x.col(0).setConstant(tau_mean);
    const LinearFit fit = ols_fit(x, scores, weights, RobustVariant::HC3);
    result.coef_mean = fit.coefficients[0];
    result.se_mean = fit.se()[0];
    result.coef_differential = std::numeric_limits<double>::quiet_NaN();
    result.se_differential = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  Eigen::MatrixXd x(n, 2);
  x.col(0).setConstant(tau_mean);
  x.col(1) = demeaned;
  const LinearFit fit = ols_fit(x, scores, weights, RobustVariant::HC3);
  const Eigen::VectorXd se = fit.se();
  result.coef_mean = fit.coefficients[0];
  result.se_mean = se[0];
  result.coef_differential = fit.coefficients[1];
  result.se_differential = se[1];
  return result;
}

CalibrationResult cf_test_calibration(const CausalForest& forest) {
  if (forest.scores.size() != forest.data.n()) {
    throw DataError("cf_test_calibration: forest carries no scores");
  }
  return calibration_test(forest.scores, forest.oob_tau, forest.data.weights);
}

std::vector<BlpRow> best_linear_projection(const Eigen::VectorXd& scores,
                                           const Eigen::MatrixXd& a,
                                           const std::vector<std::string>& names,
                                           const Eigen::VectorXd& weights) {
  const long n = scores.size();
  if (a.rows() != 0 && a.rows() != n) throw DataError("best_linear_projection: row mismatch");
  if (static_cast<long>(names.size()) != a.cols()) {
    throw DataError("best_linear_projection: need one name per projection column");
  }
  Eigen::MatrixXd x(n, a.cols() + 1);
  x.col(0).setOnes();
  if (a.cols() > 0) x.rightCols(a.cols()) = a;
  std::vector<std::string> all_names{"(intercept)"};
  all_names.insert(all_names.end(), names.begin(), names.end());

  const LinearFit fit = ols_fit(x, scores, weights, RobustVariant::HC3, all_names);
  const Eigen::VectorXd se = fit.se();
  std::vector<BlpRow> rows;
  for (long j = 0; j < fit.coefficients.size(); ++j) {
    BlpRow row;
    row.name = all_names[static_cast<std::size_t>(j)];
    row.coef = fit.coefficients[j];
    row.se = se[j];
    const double t = se[j] > 0.0 ? std::abs(row.coef / se[j]) : std::numeric_limits<double>::infinity();
    row.p_value = std::erfc(t / std::numbers::sqrt2);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BlpRow> cf_best_linear_projection(const CausalForest& forest,
                                              const Eigen::MatrixXd& a,
                                              const std::vector<std::string>& names) {
  if (forest.scores.size() != forest.data.n()) {
    throw DataError("cf_best_linear_projection: forest carries no scores");
  }
  return best_linear_projection(forest.scores, a, names, forest.data.weights);
}

}  // namespace causalkit
