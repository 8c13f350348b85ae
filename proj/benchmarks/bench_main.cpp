#include <benchmark/benchmark.h>

#include "causalkit/causal_forest.hpp"
#include "causalkit/estimators.hpp"
#include "causalkit/linear_models.hpp"
#include "causalkit/parallel.hpp"
#include "causalkit/regression_forest.hpp"
#include "causalkit/synth.hpp"

using namespace causalkit;

namespace {

Generated make_data(long n, const char* preset_name = "heterogeneous-monotone") {
  return gen(preset(preset_name, n, 12345));
}

void BM_OlsFitHC3(benchmark::State& state) {
  const Generated g = make_data(state.range(0), "confounded-linear");
  Eigen::MatrixXd x(g.data.n(), g.data.p() + 1);
  x.col(0).setOnes();
  x.rightCols(g.data.p()) = g.data.covariates;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ols_fit(x, g.data.outcome, g.data.weights, RobustVariant::HC3));
  }
}
BENCHMARK(BM_OlsFitHC3)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_LogisticFit(benchmark::State& state) {
  const Generated g = make_data(state.range(0), "confounded-linear");
  Eigen::MatrixXd x(g.data.n(), g.data.p() + 1);
  x.col(0).setOnes();
  x.rightCols(g.data.p()) = g.data.covariates;
  for (auto _ : state) {
    benchmark::DoNotOptimize(logistic_fit(x, g.data.treatment, g.data.weights));
  }
}
BENCHMARK(BM_LogisticFit)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_RegressionForest(benchmark::State& state) {
  const Generated g = make_data(state.range(0));
  RfParams params;
  params.num_trees = 200;
  params.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rf_fit(g.data.covariates, g.data.outcome, params, g.data.weights));
  }
}
BENCHMARK(BM_RegressionForest)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CausalForestFit(benchmark::State& state) {
  const Generated g = make_data(state.range(0));
  CfParams params;
  params.num_trees = 250;
  params.stage1_trees = 150;
  params.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf_fit(g.data, params, 7));
  }
}
BENCHMARK(BM_CausalForestFit)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CausalForestPredict(benchmark::State& state) {
  const Generated g = make_data(2000);
  CfParams params;
  params.num_trees = 250;
  params.stage1_trees = 150;
  params.seed = 7;
  const CausalForest forest = cf_fit(g.data, params, 7);
  const Generated q = gen(preset("heterogeneous-monotone", state.range(0), 99));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf_predict(forest, q.data.covariates));
  }
}
BENCHMARK(BM_CausalForestPredict)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
