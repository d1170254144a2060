#include <benchmark/benchmark.h>

#include "impdde/analyze.hpp"
#include "impdde/cases.hpp"
#include "impdde/cauchy.hpp"
#include "impdde/expr.hpp"
#include "impdde/fixpoint.hpp"
#include "impdde/halanay.hpp"
#include "impdde/sim.hpp"

using namespace impdde;

namespace {

const ModelSpec& worked() {
  static const ModelSpec m = cases::load("example56");
  return m;
}

const analyze::AnalysisReport& worked_report() {
  static const analyze::AnalysisReport r = analyze::analyze(worked());
  return r;
}

void BM_ExprEval(benchmark::State& state) {
  const auto e = expr::parse("0.1*(1 + abs(sin(sqrt(3)*t)))", expr::Context::time);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_ExprEval);

void BM_CauchyMatrix(benchmark::State& state) {
  const cauchy::CauchyMatrix H(worked());
  for (auto _ : state) benchmark::DoNotOptimize(H(7.3, 0.2));
}
BENCHMARK(BM_CauchyMatrix);

void BM_Integrate(benchmark::State& state) {
  const auto history = InitialHistory::constant(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(sim::integrate(worked(), history, 10.0, 0.01));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

void BM_ApplyF(benchmark::State& state) {
  const auto& r = worked_report();
  const double W = fixpoint::truncation_window(worked(), r, 1e-8);
  const double lo = -2.0 * (W + r.max_delay);
  const fixpoint::GridSpec spec{lo, 10.0, 0.01};
  const fixpoint::IntegralOperator F(worked(), spec, W);
  const auto phi = fixpoint::GridFunction::from_function(spec, worked().schedule, [](double) { return 1.0; });
  for (auto _ : state) benchmark::DoNotOptimize(F.apply(phi));
}
BENCHMARK(BM_ApplyF)->Unit(benchmark::kMillisecond);

void BM_SolveRate(benchmark::State& state) {
  const halanay::HalanayProblem p{5.0, 2.2389, 1.0, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(halanay::solve_rate(p));
}
BENCHMARK(BM_SolveRate);

}  // namespace
BENCHMARK_MAIN();
