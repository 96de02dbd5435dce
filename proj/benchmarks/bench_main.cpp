#include <benchmark/benchmark.h>

#include "lvlab/dynamics.hpp"
#include "lvlab/expr.hpp"
#include "lvlab/spectrum.hpp"
#include "lvlab/tridiag.hpp"

using namespace lvlab;

namespace {

Field profile(std::size_t n) {
  const Grid g(1.0, n);
  return sample(parse("1 + 0.5*cos(3.141592653589793*x)"), g, 0.0);
}

void BM_ThomasSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n, -1.0), b(n, 3.0), c(n, -1.0);
  const TridiagonalLU lu(a, b, c);
  std::vector<double> rhs(n, 1.0);
  for (auto _ : state) {
    lu.solve(rhs);
    benchmark::DoNotOptimize(rhs.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThomasSolve)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_PrincipalEigenpair(benchmark::State& state) {
  const Field h = profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(0.3, h).lambda);
}
BENCHMARK(BM_PrincipalEigenpair)->Arg(201)->Arg(401)->Arg(801);

void BM_SolveTheta(benchmark::State& state) {
  const Field m = profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_theta(0.3, m)[0]);
}
BENCHMARK(BM_SolveTheta)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_ImexStep(benchmark::State& state) {
  const Field m = profile(401);
  std::vector<double> ds;
  for (int i = 0; i < state.range(0); ++i) ds.push_back(0.1 * (i + 1));
  const ModelParams p{m.grid(), m, ds, std::nullopt};
  Simulation sim(p, constant_state(m.grid(), std::vector<double>(ds.size(), 0.3)), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_ImexStep)->Arg(2)->Arg(3)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
