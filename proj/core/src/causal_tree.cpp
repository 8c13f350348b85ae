#include "causalkit/causal_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"
#include "tree_split_util.hpp"

namespace causalkit {

namespace {

struct GrowData {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  const Eigen::VectorXd& w;  // treatment
  const Eigen::VectorXd& u;  // unit weights
  CtParams params;
};

struct ArmTotals {
  double sw_t = 0.0, swy_t = 0.0, sw_c = 0.0, swy_c = 0.0;
  int n_t = 0, n_c = 0;

  void add(double u, double treated, double y) {
    if (treated == 1.0) {
      sw_t += u;
      swy_t += u * y;
      ++n_t;
    } else {
      sw_c += u;
      swy_c += u * y;
      ++n_c;
    }
  }
  bool both_arms() const { return n_t > 0 && n_c > 0; }
  double tau() const { return swy_t / sw_t - swy_c / sw_c; }
  double total_weight() const { return sw_t + sw_c; }
};

// Greedy growth of the split structure. Children must satisfy the
// minimum treated/control counts on both the split and estimation halves;
// the estimation half contributes only W and X here, never Y.
struct Grower {
  const GrowData& d;
  std::vector<CtNode> nodes;
  std::vector<int> split_arena;
  std::vector<int> est_arena;

  struct Pending {
    int node_id;
    int sb, se;  // split arena range
    int eb, ee;  // est arena range
  };

  explicit Grower(const GrowData& data) : d(data) {}

  void grow(const std::vector<int>& split_ids, const std::vector<int>& est_ids, int depth_limit) {
    split_arena = split_ids;
    est_arena = est_ids;
    nodes.clear();
    nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, 0, static_cast<int>(split_arena.size()), 0,
                     static_cast<int>(est_arena.size())});
    while (!stack.empty()) {
      const Pending cur = stack.back();
      stack.pop_back();
      process(cur, depth_limit, stack);
    }
  }

  void process(const Pending& cur, int depth_limit, std::vector<Pending>& stack) {
    CtNode& node = nodes[static_cast<std::size_t>(cur.node_id)];
    ArmTotals totals;
    for (int k = cur.sb; k < cur.se; ++k) {
      const int i = split_arena[static_cast<std::size_t>(k)];
      totals.add(d.u[i], d.w[i], d.y[i]);
    }
    node.split_tau = totals.both_arms() ? totals.tau() : 0.0;

    if (node.depth >= depth_limit) return;
    if (!totals.both_arms()) return;
    const int min_t = d.params.min_treated, min_c = d.params.min_control;
    if (totals.n_t < 2 * min_t || totals.n_c < 2 * min_c) return;

    const double parent_crit = totals.total_weight() * node.split_tau * node.split_tau;
    double best_crit = parent_crit;
    int best_feature = -1;
    double best_threshold = 0.0;

    const int p = static_cast<int>(d.x.cols());
    std::vector<double> values;
    std::vector<int> order;
    std::vector<double> est_sorted;
    std::vector<int> est_prefix_t, est_prefix_c;

    for (int f = 0; f < p; ++f) {
      // Split-half units sorted by feature value.
      const int m = cur.se - cur.sb;
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

      // Estimation-half values sorted with per-arm prefix counts.
      const int me = cur.ee - cur.eb;
      est_sorted.resize(static_cast<std::size_t>(me));
      std::vector<std::pair<double, int>> est_pairs(static_cast<std::size_t>(me));
      for (int k = 0; k < me; ++k) {
        const int i = est_arena[static_cast<std::size_t>(cur.eb + k)];
        est_pairs[static_cast<std::size_t>(k)] = {d.x(i, f), d.w[i] == 1.0 ? 1 : 0};
      }
      std::stable_sort(est_pairs.begin(), est_pairs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      est_prefix_t.assign(static_cast<std::size_t>(me + 1), 0);
      est_prefix_c.assign(static_cast<std::size_t>(me + 1), 0);
      for (int k = 0; k < me; ++k) {
        est_sorted[static_cast<std::size_t>(k)] = est_pairs[static_cast<std::size_t>(k)].first;
        est_prefix_t[static_cast<std::size_t>(k + 1)] =
            est_prefix_t[static_cast<std::size_t>(k)] + est_pairs[static_cast<std::size_t>(k)].second;
        est_prefix_c[static_cast<std::size_t>(k + 1)] =
            est_prefix_c[static_cast<std::size_t>(k)] + 1 - est_pairs[static_cast<std::size_t>(k)].second;
      }
      const int est_total_t = est_prefix_t[static_cast<std::size_t>(me)];
      const int est_total_c = est_prefix_c[static_cast<std::size_t>(me)];

      // Prefix stats over the sorted split half, evaluated at candidates.
      ArmTotals left;
      int pos = 0;
      for (const int boundary : cand) {
        for (; pos <= boundary; ++pos) {
          const int i = split_arena[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
          left.add(d.u[i], d.w[i], d.y[i]);
        }
        if (left.n_t < min_t || left.n_c < min_c) continue;
        const int rn_t = totals.n_t - left.n_t, rn_c = totals.n_c - left.n_c;
        if (rn_t < min_t || rn_c < min_c) continue;

        const double threshold =
            0.5 * (values[static_cast<std::size_t>(boundary)] +
                   values[static_cast<std::size_t>(boundary + 1)]);

        // Estimation-half counts on each side of the threshold.
        const auto it = std::upper_bound(est_sorted.begin(), est_sorted.end(), threshold);
        const int e_left = static_cast<int>(it - est_sorted.begin());
        const int el_t = est_prefix_t[static_cast<std::size_t>(e_left)];
        const int el_c = est_prefix_c[static_cast<std::size_t>(e_left)];
        if (el_t < min_t || el_c < min_c) continue;
        if (est_total_t - el_t < min_t || est_total_c - el_c < min_c) continue;

        const double rsw_t = totals.sw_t - left.sw_t, rswy_t = totals.swy_t - left.swy_t;
        const double rsw_c = totals.sw_c - left.sw_c, rswy_c = totals.swy_c - left.swy_c;
        const double tau_l = left.tau();
        const double tau_r = rswy_t / rsw_t - rswy_c / rsw_c;
        const double crit = left.total_weight() * tau_l * tau_l +
                            (rsw_t + rsw_c) * tau_r * tau_r;
        const bool better =
            crit > best_crit ||
            (crit == best_crit && best_feature >= 0 &&
             (f < best_feature || (f == best_feature && threshold < best_threshold)));
        if (better && crit > parent_crit) {
          best_crit = crit;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return;

    auto below = [&](int i) { return d.x(i, best_feature) <= best_threshold; };
    const int smid = static_cast<int>(
        std::stable_partition(split_arena.begin() + cur.sb, split_arena.begin() + cur.se, below) -
        split_arena.begin());
    const int emid = static_cast<int>(
        std::stable_partition(est_arena.begin() + cur.eb, est_arena.begin() + cur.ee, below) -
        est_arena.begin());

    const int left_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int right_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    CtNode& parent = nodes[static_cast<std::size_t>(cur.node_id)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_id;
    parent.right = right_id;
    nodes[static_cast<std::size_t>(left_id)].depth = parent.depth + 1;
    nodes[static_cast<std::size_t>(right_id)].depth = parent.depth + 1;

    stack.push_back({right_id, smid, cur.se, emid, cur.ee});
    stack.push_back({left_id, cur.sb, smid, cur.eb, emid});
  }
};

int route(const std::vector<CtNode>& nodes, const Eigen::MatrixXd& x, int row) {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const CtNode& node = nodes[static_cast<std::size_t>(id)];
    id = x(row, node.feature) <= node.threshold ? node.left : node.right;
  }
  return id;
}

// Held-out criterion contribution of one node: n_ho * (2 * tau_tr * tau_ho
// - tau_tr^2); folds missing an arm on either side contribute nothing.
double heldout_score(const ArmTotals& train, const ArmTotals& holdout) {
  if (!train.both_arms() || !holdout.both_arms()) return 0.0;
  const double tt = train.tau();
  return holdout.total_weight() * (2.0 * tt * holdout.tau() - tt * tt);
}

// Leaves of the tree truncated at the given depth.
template <typename Fn>
void for_truncated_leaves(const std::vector<CtNode>& nodes, int depth, Fn&& fn) {
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const CtNode& node = nodes[v];
    const bool leaf_here = node.depth == depth || (node.feature < 0 && node.depth < depth);
    if (leaf_here) fn(static_cast<int>(v));
  }
}

void estimate_leaves(CausalTree& tree, const Dataset& ds) {
  for (auto& node : tree.nodes) {
    node.est_treated = ArmSums{};
    node.est_control = ArmSums{};
  }
  for (int i : tree.est_sample_ids) {
    int id = 0;
    for (;;) {
      CtNode& node = tree.nodes[static_cast<std::size_t>(id)];
      auto& arm = ds.treatment[i] == 1.0 ? node.est_treated : node.est_control;
      arm.add(ds.weights[i], ds.outcome[i]);
      if (node.feature < 0) break;
      id = ds.covariates(i, node.feature) <= node.threshold ? node.left : node.right;
    }
  }
  for (auto& node : tree.nodes) {
    node.n_treated = node.est_treated.count;
    node.n_control = node.est_control.count;
    if (node.n_treated > 0 && node.n_control > 0) {
      node.tau = node.est_treated.mean() - node.est_control.mean();
      node.variance = node.est_treated.var() / node.est_treated.effective_n() +
                      node.est_control.var() / node.est_control.effective_n();
    } else {
      node.tau = 0.0;
      node.variance = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

}  // namespace

int CausalTree::leaf_count() const {
  int count = 0;
  for (const auto& node : nodes) count += node.feature < 0 ? 1 : 0;
  return count;
}

int CausalTree::depth() const {
  int d = 0;
  for (const auto& node : nodes) d = std::max(d, node.depth);
  return d;
}

int CausalTree::leaf_for(const Eigen::RowVectorXd& x) const {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const CtNode& node = nodes[static_cast<std::size_t>(id)];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return id;
}

nlohmann::ordered_json CausalTree::to_json() const {
  nlohmann::ordered_json out;
  out["type"] = "causal_tree";
  out["params"] = {{"min_treated", params.min_treated},
                   {"min_control", params.min_control},
                   {"max_depth", params.max_depth},
                   {"cv_folds", params.cv_folds}};
  out["chosen_depth"] = chosen_depth;
  out["n_split_sample"] = split_sample_ids.size();
  out["n_est_sample"] = est_sample_ids.size();
  nlohmann::ordered_json node_list = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const CtNode& node = nodes[v];
    nlohmann::ordered_json j;
    j["id"] = v;
    j["depth"] = node.depth;
    if (node.feature >= 0) {
      j["feature"] = node.feature;
      j["threshold"] = node.threshold;
      j["left"] = node.left;
      j["right"] = node.right;
    } else {
      j["leaf"] = true;
      j["tau"] = node.tau;
      j["n_treated"] = node.n_treated;
      j["n_control"] = node.n_control;
      j["variance"] = node.variance;
    }
    node_list.push_back(std::move(j));
  }
  out["nodes"] = std::move(node_list);
  return out;
}

CausalTree ct_fit(const Dataset& ds, const CtParams& params, std::uint64_t seed) {
  ds.validate();
  if (ds.has_missing()) throw DataError("ct_fit: impute missing values first");
  if (params.min_treated < 1 || params.min_control < 1) {
    throw DataError("ct_fit: minimum leaf counts must be at least 1");
  }
  const long n = ds.n();

  // Honest 50/50 split.
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng = Rng::derive(seed, 0x686f6e6573ULL);  // "hones"
  rng.shuffle(ids);
  const std::size_t half = (ids.size() + 1) / 2;
  std::vector<int> split_ids(ids.begin(), ids.begin() + static_cast<long>(half));
  std::vector<int> est_ids(ids.begin() + static_cast<long>(half), ids.end());

  auto arm_counts = [&](const std::vector<int>& rows) {
    std::pair<int, int> tc{0, 0};
    for (int i : rows) (ds.treatment[i] == 1.0 ? tc.first : tc.second)++;
    return tc;
  };
  const auto [split_t, split_c] = arm_counts(split_ids);
  const auto [est_t, est_c] = arm_counts(est_ids);
  if (split_t == 0 || split_c == 0 || est_t == 0 || est_c == 0) {
    throw DataError("ct_fit: infeasible minimum-count constraints (a half-sample has an empty arm)");
  }

  GrowData data{ds.covariates, ds.outcome, ds.treatment, ds.weights, params};

  // Depth selection: cv_folds-fold cross-validation inside the split half.
  int chosen_depth = 0;
  const int k_folds = std::min<int>(params.cv_folds, static_cast<int>(split_ids.size()));
  std::vector<int> fold_of(split_ids.size());
  if (params.max_depth > 0 && k_folds >= 2) {
    std::vector<int> fold_order(split_ids.size());
    std::iota(fold_order.begin(), fold_order.end(), 0);
    rng.shuffle(fold_order);
    for (std::size_t r = 0; r < fold_order.size(); ++r) {
      fold_of[static_cast<std::size_t>(fold_order[r])] = static_cast<int>(r % k_folds) + 1;
    }

    std::vector<double> depth_score(static_cast<std::size_t>(params.max_depth) + 1, 0.0);
    for (int f = 1; f <= k_folds; ++f) {
      std::vector<int> grow_ids, held_ids;
      for (std::size_t r = 0; r < split_ids.size(); ++r) {
        (fold_of[r] == f ? held_ids : grow_ids).push_back(split_ids[r]);
      }
      const auto [gt, gc] = arm_counts(grow_ids);
      if (gt == 0 || gc == 0) continue;
      Grower grower(data);
      grower.grow(grow_ids, est_ids, params.max_depth);

      // Held-out arm totals accumulated along each unit's root path.
      std::vector<ArmTotals> ho(grower.nodes.size());
      for (int i : held_ids) {
        int id = 0;
        for (;;) {
          ho[static_cast<std::size_t>(id)].add(ds.weights[i], ds.treatment[i], ds.outcome[i]);
          const CtNode& node = grower.nodes[static_cast<std::size_t>(id)];
          if (node.feature < 0) break;
          id = ds.covariates(i, node.feature) <= node.threshold ? node.left : node.right;
        }
      }
      std::vector<ArmTotals> tr(grower.nodes.size());
      for (int i : grow_ids) {
        int id = 0;
        for (;;) {
          tr[static_cast<std::size_t>(id)].add(ds.weights[i], ds.treatment[i], ds.outcome[i]);
          const CtNode& node = grower.nodes[static_cast<std::size_t>(id)];
          if (node.feature < 0) break;
          id = ds.covariates(i, node.feature) <= node.threshold ? node.left : node.right;
        }
      }
      for (int depth = 0; depth <= params.max_depth; ++depth) {
        double score = 0.0;
        for_truncated_leaves(grower.nodes, depth, [&](int v) {
          score += heldout_score(tr[static_cast<std::size_t>(v)], ho[static_cast<std::size_t>(v)]);
        });
        depth_score[static_cast<std::size_t>(depth)] += score;
      }
    }
    for (int depth = 1; depth <= params.max_depth; ++depth) {
      if (depth_score[static_cast<std::size_t>(depth)] >
          depth_score[static_cast<std::size_t>(chosen_depth)]) {
        chosen_depth = depth;
      }
    }
  }

  Grower grower(data);
  grower.grow(split_ids, est_ids, chosen_depth);

  CausalTree tree;
  tree.nodes = std::move(grower.nodes);
  tree.split_sample_ids = std::move(split_ids);
  tree.est_sample_ids = std::move(est_ids);
  tree.params = params;
  tree.chosen_depth = chosen_depth;

  // Per-node held-out gains for pruning: within the split half, fold f held
  // out against the rest, aggregated over folds.
  tree.cv_gain.assign(tree.nodes.size(), 0.0);
  if (k_folds >= 2 && tree.nodes.size() > 1) {
    std::vector<std::vector<ArmTotals>> fold_sums(
        static_cast<std::size_t>(k_folds) + 1, std::vector<ArmTotals>(tree.nodes.size()));
    for (std::size_t r = 0; r < tree.split_sample_ids.size(); ++r) {
      const int i = tree.split_sample_ids[r];
      const int f = fold_of[r];
      int id = 0;
      for (;;) {
        fold_sums[static_cast<std::size_t>(f)][static_cast<std::size_t>(id)].add(
            ds.weights[i], ds.treatment[i], ds.outcome[i]);
        const CtNode& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) break;
        id = ds.covariates(i, node.feature) <= node.threshold ? node.left : node.right;
      }
    }
    auto complement = [&](int fold, int v) {
      ArmTotals rest;
      for (int g = 1; g <= k_folds; ++g) {
        if (g == fold) continue;
        const ArmTotals& s = fold_sums[static_cast<std::size_t>(g)][static_cast<std::size_t>(v)];
        rest.sw_t += s.sw_t;
        rest.swy_t += s.swy_t;
        rest.n_t += s.n_t;
        rest.sw_c += s.sw_c;
        rest.swy_c += s.swy_c;
        rest.n_c += s.n_c;
      }
      return rest;
    };
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
      const CtNode& node = tree.nodes[v];
      if (node.feature < 0) continue;
      double gain = 0.0;
      for (int f = 1; f <= k_folds; ++f) {
        const auto score_of = [&](int node_id) {
          return heldout_score(complement(f, node_id),
                               fold_sums[static_cast<std::size_t>(f)][static_cast<std::size_t>(node_id)]);
        };
        gain += score_of(node.left) + score_of(node.right) - score_of(static_cast<int>(v));
      }
      tree.cv_gain[v] = gain;
    }
  }

  estimate_leaves(tree, ds);
  return ct_prune(tree, tree.cv_gain);
}

CausalTree ct_prune(const CausalTree& tree, const std::vector<double>& cv_score_table) {
  if (cv_score_table.size() != tree.nodes.size()) {
    throw DataError("ct_prune: score table size does not match the tree");
  }
  CausalTree pruned = tree;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < pruned.nodes.size(); ++v) {
      CtNode& node = pruned.nodes[v];
      if (node.feature < 0) continue;
      const CtNode& l = pruned.nodes[static_cast<std::size_t>(node.left)];
      const CtNode& r = pruned.nodes[static_cast<std::size_t>(node.right)];
      if (l.feature >= 0 || r.feature >= 0) continue;
      if (cv_score_table[v] <= 0.0) {
        node.feature = -1;
        node.left = node.right = -1;
        changed = true;
      }
    }
  }

  // Compact away detached nodes, preserving breadth-first ids.
  std::vector<int> remap(pruned.nodes.size(), -1);
  std::vector<CtNode> kept;
  std::vector<double> kept_gain;
  std::vector<int> queue{0};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.erase(queue.begin());
    remap[static_cast<std::size_t>(v)] = static_cast<int>(kept.size());
    kept.push_back(pruned.nodes[static_cast<std::size_t>(v)]);
    kept_gain.push_back(cv_score_table[static_cast<std::size_t>(v)]);
    const CtNode& node = pruned.nodes[static_cast<std::size_t>(v)];
    if (node.feature >= 0) {
      queue.push_back(node.left);
      queue.push_back(node.right);
    }
  }
  for (auto& node : kept) {
    if (node.feature >= 0) {
      node.left = remap[static_cast<std::size_t>(node.left)];
      node.right = remap[static_cast<std::size_t>(node.right)];
    }
  }
  pruned.nodes = std::move(kept);
  pruned.cv_gain = std::move(kept_gain);
  return pruned;
}

Eigen::VectorXd ct_predict(const CausalTree& tree, const Eigen::MatrixXd& x) {
  bool touches_feature = false;
  int max_feature = -1;
  for (const auto& node : tree.nodes) {
    if (node.feature >= 0) {
      touches_feature = true;
      max_feature = std::max(max_feature, node.feature);
    }
  }
  if (touches_feature && max_feature >= x.cols()) {
    throw DataError("ct_predict: feature count does not match the tree");
  }
  Eigen::VectorXd out(x.rows());
  for (long i = 0; i < x.rows(); ++i) {
    out[i] = tree.nodes[static_cast<std::size_t>(route(tree.nodes, x, static_cast<int>(i)))].tau;
  }
  return out;
}

}  // namespace causalkit
