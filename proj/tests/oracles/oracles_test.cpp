#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlmc/estimator.hpp"
#include "mlmc/executor.hpp"
#include "mlmc/pde/backend.hpp"
#include "mlmc/scenarios.hpp"
#include "mlmc/sched_hetero.hpp"
#include "mlmc/sched_homog.hpp"
#include "oracles/oracles.hpp"

using namespace mlmc;

TEST(Oracle, LevelKseqMatchesExhaustiveSearch) {
  const RandomStream root(301);
  for (int i = 0; i < 500; ++i) {
    RandomStream rs = root.split(i);
    const int m = static_cast<int>(rs.uniform_int(1, 4));
    std::vector<std::int64_t> n(m);
    std::vector<double> t(m);
    double tt = 5 + 20 * rs.uniform();
    for (int j = 0; j < m; ++j) {
      n[j] = rs.uniform_int(0, 5);
      t[j] = tt;
      tt *= 0.5 + 0.5 * rs.uniform();
    }
    if (std::all_of(n.begin(), n.end(), [](auto x) { return x == 0; })) n[0] = 1;
    const auto target = rs.uniform_int(1, 25);
    const auto s = sched::level_kseq_solve(n, t, target);
    const double want = oracle::level_makespan(n, t, target);
    ASSERT_NEAR(s.makespan, want, 1e-9 * want) << "instance " << i;
    std::int64_t covered = 0;
    double span = 0;
    for (int j = 0; j < m; ++j) {
      covered += n[j] * s.k[j];
      span = std::max(span, static_cast<double>(s.k[j]) * t[j]);
    }
    ASSERT_GE(covered, target);
    ASSERT_NEAR(span, s.makespan, 1e-9 * want);
  }
}

TEST(Oracle, SingleScaleOptimum) {
  const auto t0 = scenarios::reference_model().column0();
  const auto n = scenarios::reference_counts();
  EXPECT_NEAR(oracle::single_scale_optimum(n, t0, 8192, 1), 684, 0.5);

  // SA never beats the exact optimum and finds it on small machines.
  const RandomStream root(302);
  for (int i = 0; i < 20; ++i) {
    RandomStream rs = root.split(i);
    std::vector<std::int64_t> ni{rs.uniform_int(20, 400), rs.uniform_int(2, 40)};
    std::vector<double> ti{10 + 5 * rs.uniform(), 11 + 5 * rs.uniform()};
    const std::int64_t p_max = 256;
    const double exact = oracle::single_scale_optimum(ni, ti, p_max, 1);
    const sched::HeteroProblem p{{p_max, 1, 0}, perf::RunTimeModel({{ti[0]}, {ti[1]}}), ni, {}};
    sched::SaConfig cfg;
    cfg.budget = 20000;
    const auto r = sched::sa_optimize(scenarios::default_start(p), cfg, p, rs.split(1));
    ASSERT_GE(r.best_objective.makespan, exact - 1e-9);
    EXPECT_NEAR(r.best_objective.makespan, exact, 1e-9 * exact) << "instance " << i;
  }
}

TEST(Oracle, ExpectedMakespanEnumeration) {
  const std::vector<double> hist{1.0, 2.0, 4.0};
  double sum = 0;
  for (double h : hist) sum += h;
  std::vector<double> factors;
  for (double h : hist) factors.push_back(h * hist.size() / sum);
  const auto d = perf::RuntimeFactorDistribution::empirical(hist);
  const perf::RunTimeModel model(std::vector<std::vector<double>>{{3.0}});
  for (auto [blocks, steps, n] : {std::tuple{2, 2, 4}, std::tuple{3, 1, 3}, std::tuple{4, 2, 7}}) {
    const perf::MachineConfig m{blocks, 1, 0};
    const double exact = 3.0 * oracle::expected_max_of_sums(factors, blocks, steps);
    const double est = sched::expected_makespan(0, 0, n, m, model, d, 40000, RandomStream(blocks * 10 + steps));
    EXPECT_NEAR(est, exact, 0.01 * exact) << blocks << "x" << steps;
  }
}

TEST(Oracle, SyntheticTelescopingSum) {
  // The MLMC combination of fixed sample counts estimates E[Q_L].
  SyntheticRates r;
  r.rates.alpha = 1.0 / 3.0;
  r.rates.beta = 2.0 / 3.0;
  r.rates.c_b = 0.3;
  r.rates.c_v = 0.5;
  r.q_limit = 2.0;
  SyntheticBackend b(r, 4);
  const std::vector<std::int64_t> n{20000, 5000, 1500, 400, 100};
  const RandomStream root(303);
  std::vector<LevelStats> levels;
  for (int l = 0; l <= 4; ++l) {
    const auto recs = SampleExecutor(1).run(b, l, 0, n[l], root);
    std::vector<double> y;
    for (const auto& s : recs) y.push_back(s.y_value);
    const auto st = mc_statistics(y);
    levels.push_back({n[l], st.mean, st.s2, 1.0});
  }
  const auto c = mlmc_combine(levels);
  EXPECT_NEAR(c.estimate, r.level_mean_q(4), 4 * std::sqrt(c.sampling_variance));
}

TEST(Oracle, PdeTelescopingAgainstPlainMc) {
  // mean(Y_0) + mean(Y_1) and the plain mean of Q_1 estimate the same value.
  pde::PdeOptions o;
  o.max_level = 1;
  o.qoi.kind = pde::QoiKind::flux;
  pde::PdeBackend b(o);
  constexpr int n = 120;
  const auto y0 = SampleExecutor(1).run(b, 0, 0, n, RandomStream(304));
  const auto y1 = SampleExecutor(1).run(b, 1, 0, n, RandomStream(305));
  const auto q1 = SampleExecutor(1).run(b, 1, 0, n, RandomStream(306));
  std::vector<double> a, c, q;
  for (int i = 0; i < n; ++i) {
    a.push_back(y0[i].y_value);
    c.push_back(y1[i].y_value);
    q.push_back(q1[i].q_fine);
  }
  const auto sa = mc_statistics(a, true), sc = mc_statistics(c, true), sq = mc_statistics(q, true);
  const double se = std::sqrt(sa.s2 / n + sc.s2 / n + sq.s2 / n);
  EXPECT_NEAR(sa.mean + sc.mean, sq.mean, 4 * se);
  // the correction has much smaller variance than the level itself
  EXPECT_LT(sc.s2, 0.5 * sq.s2);
}
