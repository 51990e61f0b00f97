#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlmc/estimator.hpp"
#include "mlmc/random.hpp"

using namespace mlmc;

TEST(McStatistics, Small) {
  const std::vector<double> one{5.0};
  auto a = mc_statistics(one);
  EXPECT_DOUBLE_EQ(a.mean, 5.0);
  EXPECT_DOUBLE_EQ(a.s2, 0.0);
  const std::vector<double> two{1.0, 3.0};
  auto b = mc_statistics(two);
  EXPECT_DOUBLE_EQ(b.mean, 2.0);
  EXPECT_DOUBLE_EQ(b.s2, 1.0);
  EXPECT_DOUBLE_EQ(mc_statistics(two, true).s2, 2.0);
  EXPECT_THROW(mc_statistics(std::vector<double>{}), std::invalid_argument);
}

TEST(McStatistics, NormalDraws) {
  RandomStream s(8);
  std::vector<double> x(10000);
  for (auto& v : x) v = 2.0 + 3.0 * s.normal();
  const auto st = mc_statistics(x);
  EXPECT_NEAR(st.mean, 2.0, 3 * 3.0 / 100);
  EXPECT_NEAR(st.s2, 9.0, 0.5);
}

TEST(MlmcCombine, Arithmetic) {
  std::vector<LevelStats> one{{10, 4.5, 1.0, 1.0}};
  EXPECT_DOUBLE_EQ(mlmc_combine(one).estimate, 4.5);
  std::vector<LevelStats> three{{10, 1.0, 1.0, 1}, {5, 0.1, 0.5, 8}, {2, 0.01, 0.2, 64}};
  const auto c = mlmc_combine(three);
  EXPECT_NEAR(c.estimate, 1.11, 1e-12);
  EXPECT_NEAR(c.sampling_variance, 0.1 + 0.1 + 0.1, 1e-12);
  EXPECT_NEAR(c.mse(0.1), 0.31, 1e-12);
}

TEST(OptimalCounts, HandEvaluated) {
  const std::vector<double> v1{1.0}, c1{1.0};
  EXPECT_EQ(optimal_sample_counts(v1, c1, 0.1), (std::vector<std::int64_t>{100}));
  const std::vector<double> v2{1.0, 0.25}, c2{1.0, 4.0};
  EXPECT_EQ(optimal_sample_counts(v2, c2, 0.1), (std::vector<std::int64_t>{200, 50}));
  const std::vector<double> v3{1.0, 0.0}, c3{1.0, 8.0};
  EXPECT_EQ(optimal_sample_counts(v3, c3, 0.1)[1], 1);
  const std::vector<double> zero_cost{1.0, 0.0};
  EXPECT_THROW(optimal_sample_counts(v2, zero_cost, 0.1), std::invalid_argument);
}

TEST(OptimalCounts, MeetsSamplingBudget) {
  // sum V/N <= eps_s^2 for the rounded-up counts
  const std::vector<double> v{2.0, 0.4, 0.07, 0.012}, c{1, 8, 64, 512};
  const double eps_s = 0.01;
  const auto n = optimal_sample_counts(v, c, eps_s);
  double var = 0;
  for (std::size_t l = 0; l < v.size(); ++l) var += v[l] / static_cast<double>(n[l]);
  EXPECT_LE(var, eps_s * eps_s * (1 + 1e-12));
}

TEST(Bias, Examples) {
  EXPECT_NEAR(bias_estimate(0.5, 1.0 / 3.0), 0.5, 1e-12);
  EXPECT_NEAR(bias_estimate(-0.5, 1.0 / 3.0), 0.5, 1e-12);
  EXPECT_NEAR(bias_estimate(7.0, 1.0), 1.0, 1e-12);
  EXPECT_THROW(bias_estimate(1.0, 0.0), std::invalid_argument);
  EXPECT_FALSE(needs_new_level(0.0, 1.0 / 3.0, 0.1));
  EXPECT_TRUE(needs_new_level(0.15, 1.0 / 3.0, 0.1));
  EXPECT_FALSE(needs_new_level(0.15, 1.0 / 3.0, 0.2));
}

TEST(Bias, ExactGeometricDecay) {
  // E[Q_l] - Q = c 8^{-a l}; y_L = E[Q_L] - E[Q_{L-1}]
  const double a = 1.0 / 3.0, c = 0.7;
  for (int L = 1; L <= 5; ++L) {
    const double truth = c * std::pow(8.0, -a * L);
    const double y = truth - c * std::pow(8.0, -a * (L - 1));
    EXPECT_NEAR(bias_estimate(y, a), truth, 0.1 * truth);
  }
}

TEST(Tolerance, Split) {
  Tolerance t{0.1, 0.5};
  EXPECT_NEAR(t.eps_sampling() * t.eps_sampling() + t.eps_bias() * t.eps_bias(), 0.01, 1e-15);
}

TEST(PredictCost, Exponents) {
  ConvergenceRates r;
  r.alpha = 1.0 / 3.0;
  r.beta = 2.0 / 3.0;
  r.gamma = 1.0;
  EXPECT_NEAR(predict_epsilon_cost(r, 0.01, EstimatorKind::mlmc).exponent, 3.0, 1e-12);
  r.beta = 1.0;
  EXPECT_NEAR(predict_epsilon_cost(r, 0.01, EstimatorKind::mlmc).exponent, 2.0, 1e-12);
  r.beta = 1.5;
  EXPECT_NEAR(predict_epsilon_cost(r, 0.01, EstimatorKind::mlmc).exponent, 2.0, 1e-12);

  ConvergenceRates mc;
  mc.alpha = 1.0 / 6.0;
  mc.gamma = 1.0;
  const auto p = predict_epsilon_cost(mc, 0.01, EstimatorKind::mc);
  EXPECT_NEAR(p.exponent, 8.0, 1e-12);
  EXPECT_NEAR(p.halving_factor(), 256.0, 1e-9);
  EXPECT_NEAR(p.cost, std::pow(0.01, -8.0), 1e-6 * p.cost);
}
