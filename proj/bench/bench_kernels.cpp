// Serial reference kernels against their OpenMP versions.
//   memtp_bench --benchmark_filter=Gram

#include "memtp/bounds.hpp"
#include "memtp/dual_solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using memtp::ExecPolicy;

memtp::AugmentedSystem make_system(int side) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  memtp::Vector w(Eigen::Index(side) * side);
  for (auto& v : w) v = unit(rng);
  const memtp::Vector marginal = memtp::Vector::Constant(side, 1.0 / side);
  return memtp::AugmentedSystem(side, marginal, marginal, w, 0.5, {});
}

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? ExecPolicy::Parallel : ExecPolicy::Serial;
}

void BM_ApplyTranspose(benchmark::State& state) {
  const auto system = make_system(static_cast<int>(state.range(0)));
  const memtp::Vector lambda = memtp::Vector::LinSpaced(system.rows(), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(system.apply_transpose(lambda, policy_of(state)));
}

void BM_Apply(benchmark::State& state) {
  const auto system = make_system(static_cast<int>(state.range(0)));
  const memtp::Vector x = memtp::Vector::LinSpaced(system.cols(), 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(system.apply(x, policy_of(state)));
}

void BM_WeightedGram(benchmark::State& state) {
  const auto system = make_system(static_cast<int>(state.range(0)));
  const memtp::Vector w = memtp::Vector::LinSpaced(system.cols(), 0.1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(system.weighted_gram(w, policy_of(state)));
}

void BM_LogPartition(benchmark::State& state) {
  const auto system = make_system(static_cast<int>(state.range(0)));
  const auto bounds = memtp::BoxBounds::uniform(system.cols());
  const memtp::Vector lambda = memtp::Vector::LinSpaced(system.rows(), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(memtp::log_partition(lambda, system, bounds, policy_of(state)));
}

void BM_BoundPairs(benchmark::State& state) {
  memtp::BoundSampleConfig config;
  config.side = static_cast<int>(state.range(0));
  config.pairs = 256;
  config.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(memtp::sample_bound_pairs(config));
}

void sides(benchmark::internal::Benchmark* b) {
  for (int side : {16, 64, 256})
    for (int parallel : {0, 1}) b->Args({side, parallel});
  b->ArgNames({"N", "parallel"});
}

}  // namespace

BENCHMARK(BM_ApplyTranspose)->Apply(sides);
BENCHMARK(BM_Apply)->Apply(sides);
BENCHMARK(BM_WeightedGram)->Apply(sides);
BENCHMARK(BM_LogPartition)->Apply(sides);
BENCHMARK(BM_BoundPairs)->Args({3, 0})->Args({3, 1})->Args({10, 0})->Args({10, 1})->ArgNames({"N", "parallel"});

BENCHMARK_MAIN();
