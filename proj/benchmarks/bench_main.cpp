#include <benchmark/benchmark.h>

#include <cmath>

#include "dnp/elliptic_solver.hpp"
#include "dnp/parabolic_stepper.hpp"

using namespace dnp;

static void BM_Resolvent(benchmark::State& state) {
  const MonotoneGraph g = state.range(0) == 0 ? make_power(3.0) : make_heaviside();
  double v = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.resolvent(0.1, v));
    v = v > 3.0 ? -3.0 : v + 1e-3;
  }
}
BENCHMARK(BM_Resolvent)->Arg(0)->Arg(1);

static void BM_EllipticSolve(benchmark::State& state) {
  const Mesh m = Mesh::interval(0, 1, static_cast<int>(state.range(0)));
  DiscreteField h = DiscreteField::sample(m, [](const Point& x) { return std::sin(3.0 * x.x) + 0.5; });
  h.clamp_boundary();
  const FluxModel flux = make_p_laplacian(3.0);
  const MonotoneGraph beta = make_heaviside();
  for (auto _ : state) benchmark::DoNotOptimize(solve_elliptic(m, flux, beta, h).residual);
}
BENCHMARK(BM_EllipticSolve)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ImplicitStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ProblemSetup s;
  s.mesh = Mesh::rectangle(0, 1, 0, 1, n, n);
  s.flux = make_p_laplacian(2.0);
  s.beta = make_power(3.0);
  s.T = 0.01;
  s.N = 1;
  s.u0 = DiscreteField(s.mesh);
  s.xi0 = DiscreteField::sample(s.mesh, [](const Point& x) { return 16 * x.x * (1 - x.x) * x.y * (1 - x.y); });
  s.xi0.clamp_boundary();
  const DiscreteField f(s.mesh);
  for (auto _ : state) benchmark::DoNotOptimize(step(s, 0, s.xi0, f, s.u0).residual);
}
BENCHMARK(BM_ImplicitStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
