#include <benchmark/benchmark.h>

#include "varflow/bubble.hpp"
#include "varflow/corpus.hpp"
#include "varflow/helmholtz.hpp"
#include "varflow/surface_geometry.hpp"
#include "varflow/variational.hpp"

using namespace varflow;

namespace {

bubble::SolverConfig solver(int n) {
  bubble::SolverConfig c;
  c.law_S = constitutive::BarotropicLaw::gamma_law(0.3, 2.0, constitutive::Phase::S);
  c.nr_A = n;
  c.nr_B = n;
  return c;
}

bubble::InitialData bump() {
  bubble::InitialData d;
  d.amplitude = 0.05;
  return d;
}

void BM_RadialRhs(benchmark::State& state) {
  const bubble::SolverConfig c = solver(static_cast<int>(state.range(0)));
  const bubble::RadialTwoPhaseState s = bubble::initial_state(c, bump());
  for (auto _ : state) benchmark::DoNotOptimize(bubble::radial_rhs(s, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RadialRhs)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_Rk4Step(benchmark::State& state) {
  const bubble::SolverConfig c = solver(static_cast<int>(state.range(0)));
  const bubble::RadialTwoPhaseState s = bubble::initial_state(c, bump());
  const double dt = 0.9 * bubble::stable_dt(s, c);
  for (auto _ : state) benchmark::DoNotOptimize(bubble::step(s, c, dt));
}
BENCHMARK(BM_Rk4Step)->Arg(64)->Arg(256);

void BM_SurfaceQuadrature(benchmark::State& state) {
  const geometry::ChartAtlas a = geometry::ChartAtlas::sphere(1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::make_quadrature(a, {n, n, {}}));
}
BENCHMARK(BM_SurfaceQuadrature)->Arg(24)->Arg(48);

void BM_Decompose(benchmark::State& state) {
  const helmholtz::SphereDecomposer dec(helmholtz::Sphere{}, static_cast<int>(state.range(0)));
  const helmholtz::SurfacePotential pot(helmholtz::Sphere{}, 4, std::vector<double>(25, 0.5));
  const helmholtz::SurfaceField F = [&](const geometry::SurfacePoint& p) { return pot.field(p.position); };
  for (auto _ : state) benchmark::DoNotOptimize(dec.decompose(F));
}
BENCHMARK(BM_Decompose)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Action(benchmark::State& state) {
  const variational::MultiphaseConfiguration c = corpus::make_configuration("breathing");
  const variational::ReferenceQuadrature q =
      variational::ReferenceQuadrature::build(c, variational::Discretization::coarse());
  for (auto _ : state) {
    benchmark::DoNotOptimize(variational::action(c, variational::ActionKind::CompressibleSurface, q));
  }
}
BENCHMARK(BM_Action)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
