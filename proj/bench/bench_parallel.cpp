#include "eqtrace/builtin_examples.hpp"
#include "eqtrace/parallel.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace eqtrace;

namespace {

LcpInstance random_lcp(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LcpInstance inst{Matrix(n, n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    inst.q[i] = u(rng);
    for (Index j = 0; j < n; ++j) inst.M(i, j) = u(rng);
  }
  inst.M += static_cast<double>(n) * Matrix::Identity(n, n);
  return inst;
}

std::vector<std::optional<Vector>> random_starts(Index dim, int count) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<std::optional<Vector>> starts;
  for (int k = 0; k < count; ++k) {
    Vector s(dim);
    for (Index i = 0; i < dim; ++i) s[i] = u(rng);
    starts.emplace_back(std::move(s));
  }
  return starts;
}

std::vector<LcpInstance> lcp_batch(int count) {
  std::vector<LcpInstance> batch;
  for (int k = 0; k < count; ++k) batch.push_back(random_lcp(2 + k % 6, 100 + k));
  return batch;
}

void BM_enumerate_serial(benchmark::State& state) {
  const auto inst = random_lcp(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::lcp_enumerate_serial(inst));
}

void BM_enumerate_omp(benchmark::State& state) {
  const auto inst = random_lcp(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::lcp_enumerate_omp(inst));
}

void BM_starts_serial(benchmark::State& state) {
  const auto model = builtin_example("ex2");
  const auto starts = random_starts(10, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::solve_starts_serial(model, starts, TraceConfig{}));
}

void BM_starts_omp(benchmark::State& state) {
  const auto model = builtin_example("ex2");
  const auto starts = random_starts(10, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::solve_starts_omp(model, starts, TraceConfig{}));
}

void BM_lcps_serial(benchmark::State& state) {
  const auto batch = lcp_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::solve_lcps_serial(batch, TraceConfig{}));
}

void BM_lcps_omp(benchmark::State& state) {
  const auto batch = lcp_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::solve_lcps_omp(batch, TraceConfig{}));
}

}  // namespace

BENCHMARK(BM_enumerate_serial)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate_omp)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_starts_serial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_starts_omp)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_lcps_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lcps_omp)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
