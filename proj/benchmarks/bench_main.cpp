#include <benchmark/benchmark.h>

#include "mlmc/machine_sim.hpp"
#include "mlmc/pde/backend.hpp"
#include "mlmc/pde/multigrid.hpp"
#include "mlmc/scenarios.hpp"
#include "mlmc/sched_hetero.hpp"

using namespace mlmc;

namespace {

sched::HeteroProblem s4() {
  return {scenarios::reference_machine(), scenarios::reference_model(), scenarios::reference_counts(), {}};
}

void BM_FmgSolve(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const pde::GridHierarchy h(4, level);
  const auto g = h.unit(level);
  const std::vector<double> k(g.size(), 1.0);
  pde::MultigridSolver mg(g, k, pde::Boundary::dirichlet);
  const auto f = pde::load_vector(g, 1.0);
  const pde::CycleSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(mg.solve(f, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_FmgSolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_CorrectionSample(benchmark::State& state) {
  pde::PdeOptions o;
  o.max_level = static_cast<int>(state.range(0));
  const RandomStream root(1);
  std::int64_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(pde::pde_correction_sample(o.max_level, o, sample_stream(root, o.max_level, i++)));
}
BENCHMARK(BM_CorrectionSample)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Objective(benchmark::State& state) {
  const auto p = s4();
  const sched::Genes g{{0, 443, 73, 0, 0}, {1, 98, 0, 0, 0}, {0, 0, 3, 3, 0}, {6, 0, 0, 0, 0}};
  for (auto _ : state) benchmark::DoNotOptimize(sched::objective(g, p));
}
BENCHMARK(BM_Objective);

void BM_SaOptimize(benchmark::State& state) {
  const auto p = s4();
  sched::SaConfig cfg;
  cfg.budget = static_cast<int>(state.range(0));
  cfg.mutation = sched::Mutation::hybrid_b;
  const auto start = scenarios::default_start(p);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sched::sa_optimize(start, cfg, p, RandomStream(seed++)));
}
BENCHMARK(BM_SaOptimize)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_SimulateLevelTable(benchmark::State& state) {
  const auto n = scenarios::reference_counts();
  const auto m = scenarios::reference_machine();
  const auto model =
      scenarios::reference_model().with_factors(perf::RuntimeFactorDistribution::half_normal(0.5));
  const auto s = sched::build_static_schedule(sched::select_thetas(n, m, model), n, m, model);
  sim::ExecutionMode mode;
  mode.kind = static_cast<sim::ExecutionKind>(state.range(0));
  mode.record_timeline = false;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate(s, model, mode, RandomStream(seed++)));
}
BENCHMARK(BM_SimulateLevelTable)->DenseRange(0, 2);

}  // namespace

BENCHMARK_MAIN();
