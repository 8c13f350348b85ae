#include "causalkit/regression_forest.hpp"

#include <algorithm>
#include <cmath>

#include "causalkit/errors.hpp"
#include "causalkit/parallel.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

int auto_mtry(int p, int requested) {
  if (requested > 0) return std::min(requested, p);
  return std::min(p, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p)) + 20.0)));
}

struct GrowContext {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  const Eigen::VectorXd& w;
  const RfParams& params;
  int mtry;
};

// Sorted scan buffers reused across nodes of one tree.
struct Scratch {
  std::vector<std::pair<double, int>> order;  // (value, arena position)
};

void grow_node(GrowContext& ctx, RfTree& tree, std::vector<int>& arena, int begin, int end,
               int node_id, Rng& rng, Scratch& scratch) {
  RfNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
  const int n_node = end - begin;
  node.count = n_node;

  double sw = 0.0, swy = 0.0;
  for (int k = begin; k < end; ++k) {
    const int i = arena[static_cast<std::size_t>(k)];
    sw += ctx.w[i];
    swy += ctx.w[i] * ctx.y[i];
  }
  node.value = swy / sw;

  if (n_node < 2 * ctx.params.min_leaf) return;

  // Criterion: minimizing child weighted SSE == maximizing
  // sum (sum w y)^2 / (sum w) over the children.
  const double parent_score = swy * swy / sw;
  double best_gain = 0.0;
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<int> features(static_cast<std::size_t>(ctx.x.cols()));
  for (std::size_t j = 0; j < features.size(); ++j) features[j] = static_cast<int>(j);
  // Partial Fisher-Yates: the first mtry entries are the candidate features.
  const int m = std::min(ctx.mtry, static_cast<int>(features.size()));
  for (int j = 0; j < m; ++j) {
    const std::size_t pick =
        static_cast<std::size_t>(j) +
        static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(features.size() - static_cast<std::size_t>(j))));
    std::swap(features[static_cast<std::size_t>(j)], features[pick]);
  }

  auto& order = scratch.order;
  for (int jj = 0; jj < m; ++jj) {
    const int f = features[static_cast<std::size_t>(jj)];
    order.clear();
    for (int k = begin; k < end; ++k) {
      const int i = arena[static_cast<std::size_t>(k)];
      order.emplace_back(ctx.x(i, f), k);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    double lw = 0.0, lwy = 0.0;
    for (int k = 0; k + 1 < n_node; ++k) {
      const int i = arena[static_cast<std::size_t>(order[static_cast<std::size_t>(k)].second)];
      lw += ctx.w[i];
      lwy += ctx.w[i] * ctx.y[i];
      const double v = order[static_cast<std::size_t>(k)].first;
      const double v_next = order[static_cast<std::size_t>(k + 1)].first;
      if (v == v_next) continue;
      const int n_left = k + 1;
      const int n_right = n_node - n_left;
      if (n_left < ctx.params.min_leaf || n_right < ctx.params.min_leaf) continue;
      const double rw = sw - lw, rwy = swy - lwy;
      const double gain = lwy * lwy / lw + rwy * rwy / rw - parent_score;
      const double threshold = 0.5 * (v + v_next);
      const bool better =
          gain > best_gain ||
          (gain == best_gain && best_feature >= 0 &&
           (f < best_feature || (f == best_feature && threshold < best_threshold)));
      if (better && gain > 1e-12) {
        best_gain = gain;
        best_feature = f;
        best_threshold = threshold;
      }
    }
  }

  if (best_feature < 0) return;

  // Stable partition keeps relative order on both sides, so downstream
  // accumulations are invariant to how the caller ordered the subsample.
  const auto mid_it = std::stable_partition(
      arena.begin() + begin, arena.begin() + end,
      [&](int i) { return ctx.x(i, best_feature) <= best_threshold; });
  const int mid = static_cast<int>(mid_it - arena.begin());

  node.feature = best_feature;
  node.threshold = best_threshold;
  const int left_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  const int right_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
  tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;

  grow_node(ctx, tree, arena, begin, mid, left_id, rng, scratch);
  grow_node(ctx, tree, arena, mid, end, right_id, rng, scratch);
}

RfTree grow_tree(GrowContext& ctx, std::vector<int> subsample, Rng rng) {
  RfTree tree;
  tree.subsample = std::move(subsample);
  tree.nodes.emplace_back();
  std::vector<int> arena = tree.subsample;
  Scratch scratch;
  grow_node(ctx, tree, arena, 0, static_cast<int>(arena.size()), 0, rng, scratch);
  return tree;
}

}  // namespace

double RfTree::predict_one(const Eigen::RowVectorXd& x) const {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const RfNode& node = nodes[static_cast<std::size_t>(id)];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(id)].value;
}

Eigen::VectorXd RegressionForest::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (long i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (const auto& tree : trees) acc += tree.predict_one(x.row(i));
    out[i] = acc / static_cast<double>(trees.size());
  }
  return out;
}

RegressionForest rf_fit_with_subsamples(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const RfParams& params, const Eigen::VectorXd& weights,
                                        const std::vector<std::vector<int>>& subsamples) {
  const long n = x.rows();
  if (y.size() != n || weights.size() != n) throw DataError("rf_fit: length mismatch");
  if (n < 2 * params.min_leaf) throw DataError("rf_fit: sample smaller than two leaves");
  if ((weights.array() <= 0.0).any()) throw DataError("rf_fit: weights must be positive");

  RegressionForest forest;
  forest.params = params;
  forest.params.mtry = auto_mtry(static_cast<int>(x.cols()), params.mtry);
  forest.trees.resize(subsamples.size());

  GrowContext ctx{x, y, weights, forest.params, forest.params.mtry};
  parallel_for(0, static_cast<int>(subsamples.size()), [&](int b) {
    forest.trees[static_cast<std::size_t>(b)] =
        grow_tree(ctx, subsamples[static_cast<std::size_t>(b)],
                  Rng::derive(params.seed, static_cast<std::uint64_t>(b)));
  });

  // Out-of-bag predictions; membership bitmaps keep the per-unit loop cheap.
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
  std::vector<std::vector<std::uint64_t>> in_bag(subsamples.size(),
                                                 std::vector<std::uint64_t>(words, 0));
  for (std::size_t b = 0; b < subsamples.size(); ++b) {
    for (int i : subsamples[b]) {
      in_bag[b][static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64);
    }
  }
  forest.oob_predictions.resize(n);
  forest.oob_uncovered_flags.assign(static_cast<std::size_t>(n), 0);
  parallel_for(0, static_cast<int>(n), [&](int i) {
    double acc = 0.0;
    int cnt = 0;
    for (std::size_t b = 0; b < forest.trees.size(); ++b) {
      if (in_bag[b][static_cast<std::size_t>(i / 64)] >> (i % 64) & 1ULL) continue;
      acc += forest.trees[b].predict_one(x.row(i));
      ++cnt;
    }
    if (cnt == 0) {
      forest.oob_uncovered_flags[static_cast<std::size_t>(i)] = 1;
      double full = 0.0;
      for (const auto& tree : forest.trees) full += tree.predict_one(x.row(i));
      forest.oob_predictions[i] = full / static_cast<double>(forest.trees.size());
    } else {
      forest.oob_predictions[i] = acc / cnt;
    }
  });
  forest.oob_uncovered = 0;
  for (auto f : forest.oob_uncovered_flags) forest.oob_uncovered += f;
  return forest;
}

RegressionForest rf_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const RfParams& params, const Eigen::VectorXd& weights) {
  const long n = x.rows();
  const int subsample_size =
      std::max(2, static_cast<int>(std::floor(params.subsample_fraction * static_cast<double>(n))));
  std::vector<std::vector<int>> subsamples(static_cast<std::size_t>(params.num_trees));
  for (int b = 0; b < params.num_trees; ++b) {
    // Stream tag offset keeps subsample draws distinct from in-tree draws.
    Rng rng = Rng::derive(params.seed, 0x8000000000000000ULL | static_cast<std::uint64_t>(b));
    subsamples[static_cast<std::size_t>(b)] =
        rng.sample_without_replacement(static_cast<int>(n), subsample_size);
  }
  return rf_fit_with_subsamples(x, y, params, weights, subsamples);
}

Eigen::VectorXd rf_predict_oob(const RegressionForest& forest) { return forest.oob_predictions; }

}  // namespace causalkit
