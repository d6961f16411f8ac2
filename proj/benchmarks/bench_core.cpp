#include <benchmark/benchmark.h>

#include "crp/adversary.hpp"
#include "crp/builtins.hpp"
#include "crp/randomized.hpp"
#include "crp/trustworthy.hpp"

using namespace crp;

static void BM_DistSegmentInf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Vec x(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = Rational(static_cast<long long>(i % 7), 11);
    a[i] = Rational(static_cast<long long>(i % 3), 5);
    b[i] = Rational(-static_cast<long long>(i % 5), 13);
  }
  for (auto _ : state) benchmark::DoNotOptimize(dist_segment(x, a, b, PNorm::infinity()));
}
BENCHMARK(BM_DistSegmentInf)->Arg(2)->Arg(8)->Arg(32);

static void BM_ClosedForm(benchmark::State& state) {
  const auto inst = build_instance(Family::lasso(), Dims{8, 3}, {Rational(3, 8), Rational(1, 2)});
  for (auto _ : state) benchmark::DoNotOptimize(solve_closed_form(inst));
}
BENCHMARK(BM_ClosedForm);

static void BM_GridOracle(benchmark::State& state) {
  const auto inst = build_instance(Family::bp(), Dims{}, {Rational(1, 4), Rational(1, 2)});
  const Rational step(1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(inst, step));
}
BENCHMARK(BM_GridOracle)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

// Fresh input each iteration so the per-pool memo does not hide the run.
static void BM_AttackSolver(benchmark::State& state) {
  const auto solvers = builtin_solvers();
  const auto& s = solvers[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(s->id());
  for (auto _ : state) benchmark::DoNotOptimize(attack_solver(s, Family::lp(), Dims{}));
}
BENCHMARK(BM_AttackSolver)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

static void BM_AttackResolveCompare(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(attack_checker(blind_solver(), resolve_compare_checker(), Family::lp(), Dims{}));
  }
}
BENCHMARK(BM_AttackResolveCompare)->Unit(benchmark::kMillisecond);

static void BM_TowerSolve(benchmark::State& state) {
  const auto input = make_schedule(Family::lp(), Dims{}, 1, 12);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tower_solve(input, n));
}
BENCHMARK(BM_TowerSolve)->Arg(8)->Arg(26)->Arg(64);

static void BM_DerandomizeSingle(benchmark::State& state) {
  const auto fair = bernoulli_premeasure(Rational(1, 2));
  const auto program = or_ptm().bind(1);
  for (auto _ : state) benchmark::DoNotOptimize(derandomize_single_valued(program, fair));
}
BENCHMARK(BM_DerandomizeSingle);

static void BM_CylinderMass(benchmark::State& state) {
  const auto fair = bernoulli_premeasure(Rational(2, 3));
  const auto program = or_ptm().bind(0);
  const auto strings = cylinder_set(program, "0", static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cylinder_mass(fair, strings, 10));
}
BENCHMARK(BM_CylinderMass)->Arg(6)->Arg(12);

BENCHMARK_MAIN();
