#include <benchmark/benchmark.h>

#include "penphase/phases.hpp"
#include "penphase/sweep.hpp"

namespace {

using namespace penphase;

const BindingPotential kLoop = PenningQuadrupole{4.0 / 3.0};

void BM_Classify(benchmark::State& state) {
  const auto lambda = build_lambda(build_G(make_params_adiabatic(0.2, 0.5), kLoop));
  for (auto _ : state) benchmark::DoNotOptimize(classify(lambda));
}
BENCHMARK(BM_Classify);

void BM_NormalModeBasis(benchmark::State& state) {
  const auto g = build_G(make_params_adiabatic(0.2, 0.5), kLoop);
  const auto s = classify(build_lambda(g));
  for (auto _ : state) benchmark::DoNotOptimize(normal_mode_basis(s, g));
}
BENCHMARK(BM_NormalModeBasis);

void BM_Derivative(benchmark::State& state) {
  const auto method = static_cast<DerivativeMethod>(state.range(0));
  const auto p = make_params_adiabatic(0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(dmode_domega(p, kLoop, method));
}
BENCHMARK(BM_Derivative)
    ->Arg(static_cast<int>(DerivativeMethod::Perturbative))
    ->Arg(static_cast<int>(DerivativeMethod::Implicit))
    ->Arg(static_cast<int>(DerivativeMethod::FiniteDifference));

void BM_AaPhase(benchmark::State& state) {
  const auto p = make_params_adiabatic(0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(aa_phase(p, kLoop, {{1, 0, 2}}));
}
BENCHMARK(BM_AaPhase);

void BM_SweepFig1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SweepOptions options;
  options.threads = 1;
  options.auto_extend = false;
  for (auto _ : state) benchmark::DoNotOptimize(sweep_fig1({{0, 3, n}, {0, 3, n}}, options));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SweepFig1)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FindKcr(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_kcr(1e-7));
}
BENCHMARK(BM_FindKcr)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
