// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "maxstab/experiment.hpp"
#include "maxstab/inference.hpp"

using namespace maxstab;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_LogLikelihood(benchmark::State& state) {
  const auto kind = static_cast<LikelihoodKind>(state.range(1));
  // the full likelihood sums over every partition, so it gets a smaller dimension
  const int d = kind == LikelihoodKind::Full ? 6 : 10;
  const PreparedDataset data(sample_dataset(1000, 100, d, ModelTag::Logistic, LogisticParam(0.7), RngStream(1, 1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(data, 0.65, kind, exec_of(state)));
  }
  state.SetLabel(to_string(kind) + " d=" + std::to_string(d));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

void BM_Replications(benchmark::State& state) {
  auto cfg = ExperimentConfig::defaults(Study::BiasTable);
  cfg.num_obs = 100;
  cfg.replications = 8;
  const Cell cell{0.7, 8, 50};
  const std::vector<LikelihoodKind> kinds{LikelihoodKind::StephensonTawn, LikelihoodKind::SecondOrder};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replications(cfg, cell, kinds, exec_of(state)));
  }
}

void BM_SingletonFraction(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        singleton_fraction(ModelTag::Logistic, 0.5, 3, 5000, 200, RngStream(2, 2), exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_LogLikelihood)
    ->ArgNames({"parallel", "kind"})
    ->ArgsProduct({{0, 1}, {0, 1, 2}})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Replications)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingletonFraction)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
