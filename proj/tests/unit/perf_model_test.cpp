#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "mlmc/errors.hpp"
#include "mlmc/perf_model.hpp"
#include "mlmc/scenarios.hpp"

using namespace mlmc;
using namespace mlmc::perf;

TEST(Surrogate, Examples) {
  EXPECT_DOUBLE_EQ(surrogate_time(100, 1.0, 4), 100.0);
  EXPECT_DOUBLE_EQ(surrogate_time(100, 0.0, 3), 12.5);
  EXPECT_NEAR(surrogate_time(167, 0.02, 4), 167 * (0.02 + 0.98 * 0.0625), 1e-12);
  EXPECT_NEAR(surrogate_time(167, 0.02, 4), 13.57, 0.005);
}

TEST(Surrogate, ModelMatchesFormula) {
  const std::vector<double> t0{10, 20};
  const auto m = RunTimeModel::from_surrogate(t0, 0.1, 3);
  EXPECT_EQ(m.thetas(), 4);
  EXPECT_TRUE(m.is_surrogate());
  for (int l = 0; l < 2; ++l)
    for (int th = 0; th <= 3; ++th) EXPECT_DOUBLE_EQ(m.time(l, th), surrogate_time(t0[l], 0.1, th));
}

TEST(StrongEfficiency, Examples) {
  EXPECT_DOUBLE_EQ(strong_efficiency(50, 50, 0), 1.0);
  EXPECT_NEAR(strong_efficiency(167, 83.84, 1), 0.996, 5e-4);
  EXPECT_NEAR(strong_efficiency(167, 11.60, 4), 0.900, 5e-4);
}

TEST(LevelMetrics, TableEntries) {
  const MachineConfig m{8192, 1, 4};
  auto a = level_metrics(m, 3, 16, 0, 1.0);
  EXPECT_EQ(a.j_parallel, 16);
  EXPECT_EQ(a.k_seq, 1);
  EXPECT_DOUBLE_EQ(a.imbalance, 0.0);
  EXPECT_NEAR(a.eta, 1.0, 1e-12);

  auto b = level_metrics(m, 0, 4123, 0, 1.0);
  EXPECT_EQ(b.j_parallel, 8192);
  EXPECT_EQ(b.k_seq, 1);
  EXPECT_NEAR(b.imbalance, 0.4967, 1e-4);
  EXPECT_NEAR(b.eta, 0.50, 0.005);

  auto c = level_metrics(m, 0, 4123, 4, 1.0);
  EXPECT_EQ(c.j_parallel, 512);
  EXPECT_EQ(c.k_seq, 9);
  EXPECT_NEAR(c.imbalance, 0.1053, 1e-4);
}

TEST(LevelMetrics, EffFromModelAndInfeasible) {
  const MachineConfig m{8192, 1, 4};
  const auto model = scenarios::reference_model();
  const auto r = level_metrics(m, 0, 4123, 4, model);
  EXPECT_NEAR(r.eff, 167.0 / (16 * 11.60), 1e-12);
  const MachineConfig small{64, 1, 4};
  EXPECT_THROW(level_metrics(small, 2, 10, 1, 1.0), InfeasibleConfiguration);
  EXPECT_THROW(level_metrics(m, 0, 0, 0, 1.0), std::invalid_argument);
}

TEST(TheoreticalOptimum, Examples) {
  const MachineConfig m{8192, 1, 4};
  const std::vector<std::int64_t> n{4123, 688, 108, 16};
  const std::vector<double> t0{166, 168, 174, 177};
  EXPECT_NEAR(theoretical_optimum(m, n, t0), 520.2, 0.05);

  // single level, N = J: one step, no imbalance
  const std::vector<std::int64_t> one{8192};
  const std::vector<double> t{45.0};
  EXPECT_DOUBLE_EQ(theoretical_optimum(m, one, t), 45.0 * level_metrics(m, 0, 8192, 0, 1.0).k_seq);

  // direct summation
  const std::vector<std::int64_t> base{1366, 228, 36, 5};
  const auto col = scenarios::reference_model().column0();
  double expect = 0.0;
  for (int l = 0; l < 4; ++l) expect += base[l] * std::pow(8.0, l) * col[l];
  EXPECT_NEAR(theoretical_optimum(m, base, col), expect / 8192.0, 1e-9);

  // the factor mean scales each level
  const std::vector<double> mean{2, 2, 2, 2};
  EXPECT_NEAR(theoretical_optimum(m, base, col, mean), 2 * expect / 8192.0, 1e-9);
}

TEST(ImbalanceGap, Examples) {
  const MachineConfig m{8192, 1, 4};
  const std::vector<std::int64_t> n{4123, 688, 108, 16};
  const std::vector<double> t0{167, 171, 177, 179};
  const auto g = imbalance_gap(m, 100.0, 100.0, n, t0);
  EXPECT_DOUBLE_EQ(g.delta_t, 0.0);
  EXPECT_TRUE(g.within_bound());
  EXPECT_NEAR(g.bound * g.k_seq_global / 4.0, 179.0 / 167.0, 1e-12);
  EXPECT_NEAR(179.0 / 167.0, 1.07, 0.005);
}

TEST(Factors, Degenerate) {
  RandomStream s(3);
  const auto c = RuntimeFactorDistribution::constant();
  const auto h0 = RuntimeFactorDistribution::half_normal(0.0);
  const auto flat = RuntimeFactorDistribution::empirical({4, 4, 4});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(c.draw(s), 1.0);
    EXPECT_EQ(h0.draw(s), 1.0);
    EXPECT_DOUBLE_EQ(flat.draw(s), 1.0);
  }
  EXPECT_TRUE(h0.is_degenerate());
  EXPECT_THROW(RuntimeFactorDistribution::empirical({}), std::invalid_argument);
  EXPECT_THROW(RuntimeFactorDistribution::half_normal(-1), std::invalid_argument);
}

TEST(Factors, EmpiricalMeanIsOne) {
  const auto d = RuntimeFactorDistribution::empirical(scenarios::reference_histogram());
  RandomStream s(17);
  constexpr int n = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = d.draw(s);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, 1.0, 3 * se);
  EXPECT_NEAR(d.mean(), 1.0, 1e-12);
}

TEST(Factors, HalfNormalMean) {
  const auto d = RuntimeFactorDistribution::half_normal(0.5);
  EXPECT_NEAR(d.mean(), 1.0 + std::sqrt(2 * 0.5 / M_PI), 1e-12);
  RandomStream s(4);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = d.draw(s);
    ASSERT_GE(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 100000, d.mean(), 0.01);
}

namespace {
// Closed-form least squares of t/t0 - 2^-theta = b (1 - 2^-theta).
double ls_serial_fraction(const std::vector<std::pair<int, double>>& m, double t0) {
  double num = 0, den = 0;
  for (auto [th, t] : m) {
    const double a = 1 - std::pow(2.0, -th);
    num += (t / t0 - std::pow(2.0, -th)) * a;
    den += a * a;
  }
  return num / den;
}
}  // namespace

TEST(FitSerialFraction, RoundTripAndPerfect) {
  std::vector<std::pair<int, double>> amdahl, perfect, no_t0;
  for (int th = 0; th <= 4; ++th) {
    amdahl.emplace_back(th, surrogate_time(80, 0.1, th));
    perfect.emplace_back(th, 80 * std::pow(2.0, -th));
    if (th > 0) no_t0.emplace_back(th, surrogate_time(80, 0.1, th));
  }
  EXPECT_NEAR(fit_serial_fraction(amdahl), 0.1, 1e-9);
  EXPECT_NEAR(fit_serial_fraction(perfect), 0.0, 1e-12);
  EXPECT_NEAR(fit_serial_fraction(no_t0), 0.1, 1e-9);
}

TEST(FitSerialFraction, MeasuredData) {
  // Measured efficiency list: t_theta / t_0 = 1 / (2^theta Eff).
  const auto eff = scenarios::reference_efficiencies();
  std::vector<std::pair<int, double>> from_eff;
  for (int th = 0; th <= 4; ++th) from_eff.emplace_back(th, 1.0 / (std::pow(2.0, th) * eff[th]));
  const double b = fit_serial_fraction(from_eff);
  EXPECT_GE(b, 0.01);
  EXPECT_LE(b, 0.03);

  // The timing matrix scales better than the efficiency list.
  const auto row = scenarios::reference_model().matrix()[0];
  std::vector<std::pair<int, double>> m0;
  for (int th = 0; th <= 4; ++th) m0.emplace_back(th, row[th]);
  EXPECT_NEAR(fit_serial_fraction(m0), ls_serial_fraction(m0, row[0]), 1e-12);
}

TEST(RunTimeModel, ScaledAndValidation) {
  const auto m = scenarios::reference_model();
  const auto s = m.scaled(2.0);
  EXPECT_DOUBLE_EQ(s.time(2, 3), 2 * m.time(2, 3));
  EXPECT_EQ(m.column0(), (std::vector<double>{167, 171, 177, 179}));
  EXPECT_THROW(RunTimeModel({{1.0, 2.0}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(m.time(4, 0), std::out_of_range);
}
