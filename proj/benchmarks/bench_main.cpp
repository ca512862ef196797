#include <benchmark/benchmark.h>

#include "lma/energy.hpp"
#include "lma/gramian.hpp"
#include "lma/spectral.hpp"
#include "lma/systems.hpp"

namespace {

lma::StateMatrix system_of(int n) { return lma::random_stable(n, 7, 0.1); }

void BM_Eigendecompose(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::eigendecompose(a));
}
BENCHMARK(BM_Eigendecompose)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_SolveLyapunov(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  lma::MatrixXd q = lma::MatrixXd::Identity(a.n(), a.n());
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::solve_lyapunov(a, q));
}
BENCHMARK(BM_SolveLyapunov)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_SpectralGramian(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  lma::EigenStructure eig = lma::eigendecompose(a);
  lma::MatrixXd q = lma::MatrixXd::Identity(a.n(), a.n());
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::spectral_gramian(eig, q));
}
BENCHMARK(BM_SpectralGramian)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_SubGramianSingle(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  lma::EigenStructure eig = lma::eigendecompose(a);
  lma::MatrixXd q = lma::MatrixXd::Identity(a.n(), a.n());
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::sub_gramian_single(a, eig, q, 0));
}
BENCHMARK(BM_SubGramianSingle)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_BundleAssembly(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  lma::EigenStructure eig = lma::eigendecompose(a);
  lma::MatrixXd q = lma::MatrixXd::Identity(a.n(), a.n());
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::make_bundle(a, eig, q));
}
BENCHMARK(BM_BundleAssembly)->Arg(8)->Arg(16)->Arg(32);

void BM_EnergyReport(benchmark::State& state) {
  lma::StateMatrix a = system_of(static_cast<int>(state.range(0)));
  lma::EigenStructure eig = lma::eigendecompose(a);
  auto ic = lma::InitialConditionPolicy::spherical();
  for (auto _ : state)
    benchmark::DoNotOptimize(lma::build_energy_report(a, eig, ic));
}
BENCHMARK(BM_EnergyReport)->Arg(8)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
