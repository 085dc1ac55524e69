#include <benchmark/benchmark.h>

#include "boundpair/bloch.hpp"
#include "boundpair/scans.hpp"
#include "boundpair/spectra.hpp"

using namespace boundpair;

static void BM_BuildTwoPhoton(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(static_cast<int>(state.range(0)), 0.9);
  const PairBasis basis(p.n_atoms());
  for (auto _ : state) benchmark::DoNotOptimize(build_two_photon_h(p, basis));
}
BENCHMARK(BM_BuildTwoPhoton)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_MirrorBlock(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(static_cast<int>(state.range(0)), 0.9);
  const auto h0 = build_h0(p);
  const MirrorSectors sectors{PairBasis(p.n_atoms())};
  for (auto _ : state) benchmark::DoNotOptimize(sectors.block(h0, 0));
}
BENCHMARK(BM_MirrorBlock)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_Eigensolve(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(static_cast<int>(state.range(0)), 0.9);
  const auto a = build_two_photon_h(p, PairBasis(p.n_atoms()));
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(a));
  state.SetComplexityN(a.rows());
}
BENCHMARK(BM_Eigensolve)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

static void BM_Eigenvalues(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(static_cast<int>(state.range(0)), 0.9);
  const auto a = build_two_photon_h(p, PairBasis(p.n_atoms()));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(a));
}
BENCHMARK(BM_Eigenvalues)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_MostSubradiantBound(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(static_cast<int>(state.range(0)), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(most_subradiant_bound(p));
}
BENCHMARK(BM_MostSubradiantBound)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_BoundStateAtPi(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(2, 1.02);
  BoundSearch s;
  s.truncation = static_cast<int>(state.range(0));
  s.check_convergence = false;
  for (auto _ : state) benchmark::DoNotOptimize(bound_state_at(0.9 * kPi, p, s));
}
BENCHMARK(BM_BoundStateAtPi)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_KpMass(benchmark::State& state) {
  const auto p = ArrayParams::from_period12(2, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(inv_mass_kp(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_KpMass)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_OscillationSpectrum(benchmark::State& state) {
  std::vector<double> n, d;
  for (int k = 20; k <= 100; ++k) {
    n.push_back(k);
    d.push_back(std::exp(-0.05 * k) * (1.0 + 0.2 * std::cos(0.22 * kPi * k)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(oscillation_wavevector(n, d));
}
BENCHMARK(BM_OscillationSpectrum);

BENCHMARK_MAIN();
