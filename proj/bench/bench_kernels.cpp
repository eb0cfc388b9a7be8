#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rvasym/kernels.hpp"
#include "rvasym/mc_engine.hpp"
#include "rvasym/model_space.hpp"
#include "rvasym/rate_solver.hpp"

using namespace rvasym;

namespace {

std::vector<double> randn(std::size_t n) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> N;
  std::vector<double> v(n);
  for (auto& x : v) x = N(g);
  return v;
}

Exec mode(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_Convolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = randn(n), x = randn(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    kernels::causal_convolve(c, x, out, mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->ArgsProduct({{256, 1024, 4096}, {0, 1}});

void BM_ConvolveAdjoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = randn(n), z = randn(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    kernels::causal_convolve_adjoint(c, z, out, mode(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ConvolveAdjoint)->ArgsProduct({{1024, 4096}, {0, 1}});

void BM_PairTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ItoModel m = ModelSampler(0.2, n, 2, 3).sample(0);
  for (auto _ : state) {
    PairTable pt(m, mode(state));
    benchmark::DoNotOptimize(pt.level(1, 0, n));
  }
}
BENCHMARK(BM_PairTable)->ArgsProduct({{128, 512}, {0, 1}});

void BM_HomogeneousNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ItoModel m = ModelSampler(0.3, n, 2, 3).sample(0);
  for (auto _ : state) benchmark::DoNotOptimize(homogeneous_norm(m, mode(state)));
}
BENCHMARK(BM_HomogeneousNorm)->ArgsProduct({{256, 1024}, {0, 1}});

void BM_ImportanceSampling(benchmark::State& state) {
  VolModelSpec s;
  s.sigma = {SigmaKind::exp_ou, 0.2, 1.0};
  s.rho = -0.7;
  s.H = 0.3;
  const auto sol = solve_rate(0.1, s, 32);
  McOptions o;
  o.n_steps = 64;
  o.n_paths = static_cast<std::size_t>(state.range(0));
  o.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(price_call_is(0.3, sol, ScalingRegime{}, o).log_price);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImportanceSampling)->ArgsProduct({{10000}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
