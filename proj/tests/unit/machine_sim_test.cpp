#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlmc/machine_sim.hpp"
#include "mlmc/scenarios.hpp"

using namespace mlmc;

namespace {
const std::vector<std::int64_t> kN{4123, 688, 108, 16};
const perf::MachineConfig kMachine{8192, 1, 4};

sched::StaticSchedule lesyhom(const perf::RunTimeModel& model) {
  return sched::build_static_schedule(sched::select_thetas(kN, kMachine, model), kN, kMachine, model);
}

sim::ExecutionMode mode(sim::ExecutionKind k) {
  sim::ExecutionMode m;
  m.kind = k;
  return m;
}
}  // namespace

TEST(Simulate, ConstantFactorsMatchPrediction) {
  const auto model = scenarios::reference_model();
  const auto s = lesyhom(model);
  for (auto k : {sim::ExecutionKind::static_sample_sync, sim::ExecutionKind::static_level_sync,
                 sim::ExecutionKind::dynamic}) {
    const auto r = sim::simulate(s, model, mode(k), RandomStream(1));
    EXPECT_NEAR(r.makespan, s.predicted_time(), 1e-9) << static_cast<int>(k);
  }
}

TEST(Simulate, StaticComputesWholeSteps) {
  const auto model = scenarios::reference_model();
  const auto s = lesyhom(model);
  const auto r = sim::simulate(s, model, mode(sim::ExecutionKind::static_level_sync), RandomStream(1));
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(r.computed[l], s.levels[l].k_seq * s.levels[l].blocks);
    EXPECT_EQ(r.required[l], kN[l]);
  }
  EXPECT_EQ(r.oversampled[0], 485);
  std::int64_t rects = 0;
  for (auto c : r.computed) rects += c;
  EXPECT_EQ(static_cast<std::int64_t>(r.timeline.size()), rects);

  const auto d = sim::simulate(s, model, mode(sim::ExecutionKind::dynamic), RandomStream(1));
  EXPECT_EQ(d.computed, d.required);
}

TEST(Simulate, HeteroMatchesObjective) {
  const sched::HeteroProblem p{kMachine, scenarios::reference_model(), kN, {}};
  const sched::Genes g{{0, 443, 73, 0, 0}, {1, 98, 0, 0, 0}, {0, 0, 3, 3, 0}, {6, 0, 0, 0, 0}};
  sched::ScheduleMatrix sm;
  const auto obj = sched::objective(g, p, &sm);
  for (auto k : {sim::ExecutionKind::static_sample_sync, sim::ExecutionKind::static_level_sync}) {
    const auto r = sim::simulate(sm, p, mode(k), RandomStream(2));
    EXPECT_NEAR(r.makespan, obj.makespan, 1e-9);
  }
}

TEST(Simulate, VariationIsDeterministicPerStream) {
  const auto model = scenarios::reference_model().with_factors(perf::RuntimeFactorDistribution::half_normal(0.5));
  const auto s = lesyhom(model);
  const auto m = mode(sim::ExecutionKind::static_level_sync);
  const auto a = sim::simulate(s, model, m, RandomStream(3));
  const auto b = sim::simulate(s, model, m, RandomStream(3));
  const auto c = sim::simulate(s, model, m, RandomStream(4));
  EXPECT_EQ(a.makespan, b.makespan);
  EXPECT_NE(a.makespan, c.makespan);
  EXPECT_GT(a.makespan, s.predicted_time());
}

TEST(Simulate, SampleSyncNeverFasterThanLevelSync) {
  // the same factors feed both modes, and per-step barriers can only add time
  const auto model = scenarios::reference_model().with_factors(perf::RuntimeFactorDistribution::half_normal(1.0));
  const auto s = lesyhom(model);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ss = sim::simulate(s, model, mode(sim::ExecutionKind::static_sample_sync), RandomStream(seed));
    const auto ls = sim::simulate(s, model, mode(sim::ExecutionKind::static_level_sync), RandomStream(seed));
    EXPECT_GE(ss.makespan, ls.makespan - 1e-9);
  }
}

TEST(Efficiency, Report) {
  const auto model = scenarios::reference_model();
  const auto s = lesyhom(model);
  const auto r = sim::simulate(s, model, mode(sim::ExecutionKind::static_level_sync), RandomStream(1));
  const double opt = perf::theoretical_optimum(kMachine, kN, scenarios::reference_t0());
  const auto e = sim::efficiency_report(r, opt);
  EXPECT_NEAR(e.efficiency, 0.89, 0.005);
  sim::SimReport same = r;
  EXPECT_DOUBLE_EQ(sim::efficiency_report(same, r.makespan).efficiency, 1.0);
  EXPECT_THROW(sim::efficiency_report(r, 0.0), std::invalid_argument);
}

TEST(FactorSource, WithoutReplacementUsesEveryEntry) {
  const auto d = perf::RuntimeFactorDistribution::empirical({1, 2, 3, 4});
  sim::FactorSource src(d, perf::FactorSampling::without_replacement, RandomStream(5));
  std::vector<double> got;
  for (int i = 0; i < 4; ++i) got.push_back(src(0, i));
  std::sort(got.begin(), got.end());
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(got[j], d.normalized(j));
  // keyed by index, not call order
  EXPECT_EQ(src(0, 2), src(0, 2));
}
