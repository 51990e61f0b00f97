// Randomized invariants of the performance model and the schedulers.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlmc/machine_sim.hpp"
#include "mlmc/scenarios.hpp"
#include "mlmc/sched_hetero.hpp"
#include "mlmc/sched_homog.hpp"

using namespace mlmc;

namespace {

struct RandomCase {
  perf::MachineConfig machine;
  perf::RunTimeModel model;
  std::vector<std::int64_t> n;
};

// Power-of-two machines, t_{l,0} non-decreasing in l, Amdahl surrogate.
RandomCase random_case(RandomStream& rs) {
  RandomCase c;
  const int levels = static_cast<int>(rs.uniform_int(1, 4));
  const int s = static_cast<int>(rs.uniform_int(0, 4));
  c.machine = {std::int64_t{1} << rs.uniform_int(3 * levels + s, 18), std::int64_t{1} << rs.uniform_int(0, 1), s};
  auto one_each = [&] {
    std::int64_t sum = 0;
    for (int l = 0; l < levels; ++l) sum += c.machine.processors_per_sample(l, 0);
    return sum;
  };
  while (c.machine.processors_per_sample(levels - 1, s) > c.machine.p_max || one_each() > c.machine.p_max)
    c.machine.p_max *= 2;
  std::vector<double> t0;
  double t = 10 + 100 * rs.uniform();
  for (int l = 0; l < levels; ++l) {
    t0.push_back(t);
    t *= 1 + 0.1 * rs.uniform();
  }
  c.model = perf::RunTimeModel::from_surrogate(t0, 0.2 * rs.uniform(), s);
  for (int l = 0; l < levels; ++l) c.n.push_back(rs.uniform_int(1, 5000 >> (2 * l)));
  return c;
}

}  // namespace

TEST(Properties, LevelMetricRanges) {
  const RandomStream root(101);
  for (int i = 0; i < 500; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    for (int l = 0; l < static_cast<int>(c.n.size()); ++l)
      for (int th = 0; th <= sched::max_feasible_theta(l, c.machine, c.model); ++th) {
        const auto m = perf::level_metrics(c.machine, l, c.n[l], th, c.model);
        ASSERT_GE(m.imbalance, 0.0);
        ASSERT_LT(m.imbalance, 1.0);
        ASSERT_GT(m.eta, 0.0);
        ASSERT_LE(m.eta, 1.0 + 1e-12);
        ASSERT_LT(m.k_seq * m.j_parallel - c.n[l], m.j_parallel);
      }
    const auto s = sched::build_static_schedule(sched::select_thetas(c.n, c.machine, c.model), c.n, c.machine,
                                                c.model);
    for (const auto& lv : s.levels) {
      ASSERT_GE(lv.oversampling(), 0);
      ASSERT_LT(lv.oversampling(), lv.blocks);
    }
  }
}

TEST(Properties, ScaleInvariance) {
  const RandomStream root(102);
  for (int i = 0; i < 100; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    const double a = 0.1 + 10 * rs.uniform();
    const auto scaled = c.model.scaled(a);
    const auto t1 = sched::select_thetas(c.n, c.machine, c.model);
    const auto t2 = sched::select_thetas(c.n, c.machine, scaled);
    ASSERT_EQ(t1.theta, t2.theta);
    ASSERT_NEAR(t2.total(), a * t1.total(), 1e-9 * a * t1.total());
    const auto o1 = perf::theoretical_optimum(c.machine, c.n, c.model.column0());
    const auto o2 = perf::theoretical_optimum(c.machine, c.n, scaled.column0());
    ASSERT_NEAR(o2, a * o1, 1e-9 * a * o1);

    const sched::HeteroProblem p1{c.machine, c.model, c.n, {}}, p2{c.machine, scaled, c.n, {}};
    const auto g = scenarios::default_start(p1);
    ASSERT_EQ(g, scenarios::default_start(p2));
    ASSERT_NEAR(sched::objective(g, p2).makespan, a * sched::objective(g, p1).makespan,
                1e-9 * a * sched::objective(g, p1).makespan);
  }
}

TEST(Properties, RobustEqualsDeterministicUnderConstantFactors) {
  const RandomStream root(103);
  for (int i = 0; i < 100; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    const auto r = sched::select_thetas_robust(c.n, c.machine, c.model, perf::RuntimeFactorDistribution::constant(),
                                               root.split(1000 + i));
    ASSERT_EQ(r.theta, sched::select_thetas(c.n, c.machine, c.model).theta);
  }
}

TEST(Properties, SimulationMatchesPredictionWithoutVariation) {
  const RandomStream root(104);
  for (int i = 0; i < 100; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    const auto s = sched::build_static_schedule(sched::select_thetas(c.n, c.machine, c.model), c.n, c.machine,
                                                c.model);
    for (auto kind : {sim::ExecutionKind::static_sample_sync, sim::ExecutionKind::static_level_sync,
                      sim::ExecutionKind::dynamic}) {
      sim::ExecutionMode m;
      m.kind = kind;
      m.record_timeline = false;
      const auto r = sim::simulate(s, c.model, m, root.split(2000 + i));
      ASSERT_NEAR(r.makespan, s.predicted_time(), 1e-9 * s.predicted_time());
    }
  }
}

TEST(Properties, ImbalanceGapBound) {
  const RandomStream root(105);
  for (int i = 0; i < 100; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    const auto s = sched::build_static_schedule(sched::select_thetas(c.n, c.machine, c.model), c.n, c.machine,
                                                c.model);
    sim::ExecutionMode m;
    m.record_timeline = false;
    const auto r = sim::simulate(s, c.model, m, root.split(3000 + i));
    const auto t0 = c.model.column0();
    const auto opt = perf::theoretical_optimum(c.machine, c.n, t0);
    const auto g = perf::imbalance_gap(c.machine, r.makespan, opt, c.n, t0);
    ASSERT_TRUE(g.within_bound()) << "case " << i << ": dt " << g.delta_t << " bound " << g.bound;
  }
}

TEST(Properties, RepairAlwaysFeasible) {
  const RandomStream root(106);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    RandomStream rs = root.split(i);
    const auto c = random_case(rs);
    const sched::HeteroProblem p{c.machine, c.model, c.n, {}};
    auto g = sched::zero_genes(p);
    for (int l = 0; l < p.levels(); ++l)
      for (int t = 0; t <= p.s(); ++t) {
        const auto b = sched::gene_bound(p.machine, l, t);
        g[l][t] = rs.uniform() < 0.3 ? 0 : rs.uniform_int(-b, 3 * b);
      }
    const auto r = sched::repair(g, p);
    ASSERT_TRUE(sched::satisfies_constraints(r, p)) << "candidate " << i;
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(Properties, TransferNeverGrowsFootprint) {
  const auto p = sched::HeteroProblem{scenarios::reference_machine(), scenarios::reference_model(),
                                      scenarios::reference_counts(), {}};
  sched::SaConfig cfg;
  cfg.hybrid_rate = 0.0;  // isolate the transfer move
  const RandomStream root(107);
  auto g = scenarios::default_start(p);
  for (int i = 0; i < 10000; ++i) {
    RandomStream rs = root.split(i);
    const auto before = sched::processors_used(g, p.machine);
    auto next = sched::mutate(g, sched::Mutation::hybrid_a, i, cfg, p, rs);
    ASSERT_LE(sched::processors_used(next, p.machine), before) << "move " << i;
    // restart from a random feasible point now and then
    if (i % 100 == 99) {
      RandomStream rr = rs.split(1);
      next = sched::mutate(next, sched::Mutation::random_reset, 0, cfg, p, rr);
    }
    g = std::move(next);
  }
}

TEST(Properties, SaTraceNeverWorsens) {
  const auto p = sched::HeteroProblem{scenarios::reference_machine(), scenarios::reference_model(),
                                      scenarios::reference_counts(), {}};
  for (auto op : {sched::Mutation::random_reset, sched::Mutation::non_uniform, sched::Mutation::gaussian,
                  sched::Mutation::hybrid_a, sched::Mutation::hybrid_b}) {
    sched::SaConfig cfg;
    cfg.mutation = op;
    cfg.budget = 500;
    const auto start = scenarios::default_start(p);
    const auto r = sched::sa_optimize(start, cfg, p, RandomStream(static_cast<std::uint64_t>(op)));
    ASSERT_EQ(r.trace.size(), 500u);
    EXPECT_LE(r.best_objective.makespan, sched::objective(start, p).makespan);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      const sched::Objective prev{r.trace[i - 1].best_makespan, r.trace[i - 1].best_idle, true};
      const sched::Objective cur{r.trace[i].best_makespan, r.trace[i].best_idle, true};
      ASSERT_FALSE(prev.better_than(cur)) << sched::to_string(op) << " at " << i;
    }
    EXPECT_TRUE(sched::satisfies_constraints(r.best, p));
  }
}
