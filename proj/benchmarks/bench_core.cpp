#include <benchmark/benchmark.h>

#include <numbers>

#include "mcslab/distortion.hpp"
#include "mcslab/manifold.hpp"
#include "mcslab/nets.hpp"
#include "mcslab/operator.hpp"
#include "mcslab/reach.hpp"
#include "mcslab/recovery.hpp"
#include "mcslab/sample.hpp"

namespace {

void BM_EstimateReachCircle(benchmark::State& state) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 8), state.range(0), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(mcs::estimate_reach(s).tau);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EstimateReachCircle)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_GreedyNet(benchmark::State& state) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 2), 4000, 0.01);
  const double delta = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mcs::greedy_net(s, delta).centers.size());
}
BENCHMARK(BM_GreedyNet)->Arg(10)->Arg(100);

void BM_DrawOperator(benchmark::State& state) {
  const auto M = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(mcs::MeasurementOperator::draw(M, 1024, 1).matrix().data());
  state.SetItemsProcessed(state.iterations() * M * 1024);
}
BENCHMARK(BM_DrawOperator)->Arg(16)->Arg(64)->Arg(256);

void BM_EmbeddingDistortion(benchmark::State& state) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 256), 2000, 0.01);
  const auto sec = mcs::sample_secants(s, 0.0016, 1.0, {10000, 1});
  const auto op = mcs::MeasurementOperator::draw(state.range(0), 256, 1);
  for (auto _ : state) benchmark::DoNotOptimize(mcs::embedding_distortion(op, sec).eps_hat);
}
BENCHMARK(BM_EmbeddingDistortion)->Arg(8)->Arg(128);

void BM_RecoverSignal(benchmark::State& state) {
  const auto model = mcs::make_circle(1.0, 256);
  const auto op = mcs::MeasurementOperator::draw(64, 256, 3);
  const auto y = op.apply(model.point(1.0));
  mcs::SolverOptions opts;
  opts.grid = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(mcs::recover_signal(model, op, y, opts).residual);
}
BENCHMARK(BM_RecoverSignal)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
