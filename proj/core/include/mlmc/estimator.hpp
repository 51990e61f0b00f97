#pragma once

// MC / MLMC estimator mathematics: sample statistics, optimal sample
// allocation, bias estimate and cost-complexity exponents.

#include <cstdint>
#include <span>
#include <vector>

namespace mlmc {

struct ConvergenceRates {
  double alpha = 1.0 / 3.0;  // bias rate in M_l
  double beta = 2.0 / 3.0;   // variance rate
  double gamma = 1.0;        // cost rate
  double c_b = 1.0;
  double c_v = 1.0;
  double c_c = 1.0;

  void validate() const;
};

struct Tolerance {
  double eps = 0.01;
  // Share of eps^2 given to the sampling error.
  double split_weight = 0.5;

  double eps_sampling() const;
  double eps_bias() const;
};

struct LevelStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double s2 = 0.0;
  double cost = 0.0;  // seconds per correction sample
};

struct McStatistics {
  double mean = 0.0;
  double s2 = 0.0;
};

// Mean and variance. Population form (divide by N) unless `unbiased`.
McStatistics mc_statistics(std::span<const double> samples, bool unbiased = false);

struct Combined {
  double estimate = 0.0;
  double sampling_variance = 0.0;  // sum_l s2_l / N_l
  // bias^2 + sampling variance, given a bias estimate.
  double mse(double bias) const { return bias * bias + sampling_variance; }
};

Combined mlmc_combine(std::span<const LevelStats> levels);

// N_l = ceil(eps_s^-2 (sum_k sqrt(V_k C_k)) sqrt(V_l / C_l)), at least 1.
std::vector<std::int64_t> optimal_sample_counts(std::span<const double> variances,
                                                std::span<const double> costs, double eps_s);

// |y_hat_L| / (8^alpha - 1).
double bias_estimate(double y_hat_L, double alpha);

// |y_hat_L| > (8^alpha - 1) eps_b.
bool needs_new_level(double y_hat_L, double alpha, double eps_b);

enum class EstimatorKind { mc, mlmc };

struct CostPrediction {
  double exponent = 0.0;  // cost = O(eps^-exponent)
  double cost = 0.0;      // eps^-exponent, order of magnitude only
  // Cost multiplier when eps is halved.
  double halving_factor() const;
};

CostPrediction predict_epsilon_cost(const ConvergenceRates& rates, double eps, EstimatorKind kind);

}  // namespace mlmc
