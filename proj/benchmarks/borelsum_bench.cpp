#include <benchmark/benchmark.h>

#include "borelsum/formal.hpp"
#include "borelsum/goursat.hpp"
#include "borelsum/oracle.hpp"
#include "borelsum/singularity.hpp"
#include "borelsum/summation.hpp"

using namespace borelsum;

static void BM_JOperatorSetup(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  const goursat::GoursatDomain d;
  for (auto _ : state) benchmark::DoNotOptimize(goursat::JOperator(d, V));
}
BENCHMARK(BM_JOperatorSetup)->Unit(benchmark::kMillisecond);

static void BM_JApply(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  const goursat::GoursatDomain d;
  const goursat::JOperator J(d, V);
  const auto f = goursat::make_field(d, [](cplx, double t) { return cplx(t); });
  for (auto _ : state) benchmark::DoNotOptimize(J.apply(f));
}
BENCHMARK(BM_JApply)->Unit(benchmark::kMillisecond);

static void BM_SolveFixedPoint(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  goursat::GoursatDomain d;
  d.n_t = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(goursat::solve_fixed_point(V, d));
}
BENCHMARK(BM_SolveFixedPoint)->Arg(12)->Arg(22)->Arg(33)->Unit(benchmark::kMillisecond);

static void BM_SolutionPair(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  const goursat::PsiField P(goursat::solve_fixed_point(V, goursat::GoursatDomain{}));
  std::vector<double> xs;
  for (int m = -16; m <= 16; ++m) xs.push_back(0.05 * m);
  for (auto _ : state) benchmark::DoNotOptimize(summation::build_solution_pair(P, nullptr, 15.0, xs));
}
BENCHMARK(BM_SolutionPair)->Unit(benchmark::kMillisecond);

static void BM_WkbCoefficients(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  for (auto _ : state) benchmark::DoNotOptimize(formal::wkb_coefficients(V, 1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_WkbCoefficients)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_OracleIntegrate(benchmark::State& state) {
  const auto V = potentials::inverse_quadratic();
  const double lam = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::integrate(V, lam, 1.0 / lam, kI, -0.8, 0.8, 33));
}
BENCHMARK(BM_OracleIntegrate)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_BranchSolve(benchmark::State& state) {
  const auto spec = singularity::branch_spec(0.5, "one");
  singularity::BranchGrid g;
  g.n_v = g.n_w = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(singularity::solve_branch_fixed_point(spec, g));
}
BENCHMARK(BM_BranchSolve)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
