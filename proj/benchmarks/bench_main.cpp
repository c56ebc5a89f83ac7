#include <benchmark/benchmark.h>

#include <numbers>

#include "gradbif/bifurcate.hpp"

using namespace gradbif;

namespace {

ProblemSpec threshold_problem(int n, double lambda) {
  ProblemSpec P;
  P.domain = DomainSpec::interval(0, 1, n);
  P.g = GSpec::power_shift(0.5, 1.0);
  P.f = FSpec::constant();
  P.mu = 1.0;
  P.p = 2.0;
  P.lambda = lambda;
  return P;
}

void BM_EigenpairInterval(benchmark::State& state) {
  const auto d = DomainSpec::interval(0, 1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(d).lambda1);
}
BENCHMARK(BM_EigenpairInterval)->Arg(256)->Arg(1024)->Arg(4096);

void BM_EigenpairSquare(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto d = DomainSpec::rectangle(0, 1, 0, 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(d).lambda1);
}
BENCHMARK(BM_EigenpairSquare)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MinimalSubsolution(benchmark::State& state) {
  const auto d = DomainSpec::interval(0, 1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(minimal_subsolution(GSpec::power(0.5), d).iterations);
}
BENCHMARK(BM_MinimalSubsolution)->Arg(256)->Arg(1024);

void BM_NewtonDirect(benchmark::State& state) {
  const ProblemSpec P = threshold_problem(static_cast<int>(state.range(0)), 2.0);
  const ScalarField start = boundary_distance(P.domain);
  for (auto _ : state) benchmark::DoNotOptimize(solve_newton(P, start).iterations);
}
BENCHMARK(BM_NewtonDirect)->Arg(128)->Arg(512);

void BM_Transformed(benchmark::State& state) {
  const ProblemSpec P = threshold_problem(static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_transformed_p2(P).iterations);
}
BENCHMARK(BM_Transformed)->Arg(128)->Arg(512);

void BM_SolveH(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_h(GSpec::power(0.5)).h_eta());
}
BENCHMARK(BM_SolveH)->Unit(benchmark::kMillisecond);

void BM_BisectThreshold(benchmark::State& state) {
  const ProblemSpec P = threshold_problem(static_cast<int>(state.range(0)), 2.0);
  const double tol = 1e-6 * std::numbers::pi * std::numbers::pi / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bisect_threshold(P, Axis::lambda, 0.0, 9.8696, tol).estimate);
  }
}
BENCHMARK(BM_BisectThreshold)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
