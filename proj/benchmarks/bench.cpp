#include <benchmark/benchmark.h>

#include "magsurf/closure.hpp"
#include "magsurf/index_form.hpp"

using namespace magsurf;

namespace {

MagneticSystem flat_unit() {
  return {ChartMetric::euclidean(), FieldStrength::constant(1.0)};
}

void BM_Integrate(benchmark::State& state) {
  MagneticSystem sys = flat_unit();
  PhasePoint start{{0, 0}, {1, 0}};
  const double T = state.range(0);
  for (auto _ : state) {
    Trajectory traj = integrate(sys, start, T);
    benchmark::DoNotOptimize(traj.end());
  }
}
BENCHMARK(BM_Integrate)->Arg(1)->Arg(10);

void BM_JacobiPropagate(benchmark::State& state) {
  MagneticSystem sys = flat_unit();
  Trajectory traj = integrate(sys, {{0, 0}, {1, 0}}, 10.0);
  for (auto _ : state) {
    JacobiState J = propagate_jacobi(sys, traj, {0, 0}, {0, 1});
    benchmark::DoNotOptimize(J.samples().back());
  }
}
BENCHMARK(BM_JacobiPropagate);

void BM_IndexGram(benchmark::State& state) {
  MagneticSystem sys = flat_unit();
  Trajectory traj = integrate(sys, {{0, 0}, {1, 0}}, 3.0);
  const int N = state.range(0);
  for (auto _ : state) {
    GramSummary g = index_gram(sys, traj, N);
    benchmark::DoNotOptimize(g.smallest_eigenvalue);
  }
}
BENCHMARK(BM_IndexGram)->Arg(64)->Arg(256);

void BM_ScatteringTable(benchmark::State& state) {
  MagneticSystem sys = flat_unit();
  Domain dom(sys.chart, DomainSpec::circle({0, 0}, 0.5));
  StepControl ctrl;
  ctrl.step_scale = 1e-2;
  for (auto _ : state) {
    auto table = scattering_table(sys, dom, 8, 8, 0.0, ctrl, 1);
    benchmark::DoNotOptimize(table.back().l);
  }
}
BENCHMARK(BM_ScatteringTable);

}  // namespace

BENCHMARK_MAIN();
