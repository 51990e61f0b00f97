#include "mlmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmc {

void ConvergenceRates::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0) || beta > 2.0 * alpha + 1e-12)
    throw std::invalid_argument("beta must lie in (0, 2 alpha]");
  if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  if (!(c_b >= 0.0) || !(c_v >= 0.0) || !(c_c > 0.0))
    throw std::invalid_argument("rate constants must be non-negative (c_c positive)");
}

double Tolerance::eps_sampling() const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(split_weight > 0.0 && split_weight < 1.0))
    throw std::invalid_argument("split weight must lie in (0,1)");
  return std::sqrt(split_weight) * eps;
}

double Tolerance::eps_bias() const {
  (void)eps_sampling();
  return std::sqrt(1.0 - split_weight) * eps;
}

McStatistics mc_statistics(std::span<const double> samples, bool unbiased) {
  if (samples.empty()) throw std::invalid_argument("mc_statistics: no samples");
  // Welford for stability at large N.
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double y : samples) {
    ++n;
    const double d = y - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (y - mean);
  }
  McStatistics s;
  s.mean = mean;
  if (unbiased)
    s.s2 = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  else
    s.s2 = m2 / static_cast<double>(n);
  return s;
}

Combined mlmc_combine(std::span<const LevelStats> levels) {
  if (levels.empty()) throw std::invalid_argument("mlmc_combine: level 0 missing");
  Combined c;
  for (const auto& l : levels) {
    c.estimate += l.mean;
    if (l.n > 0) c.sampling_variance += l.s2 / static_cast<double>(l.n);
  }
  return c;
}

std::vector<std::int64_t> optimal_sample_counts(std::span<const double> variances,
                                                std::span<const double> costs, double eps_s) {
  if (variances.size() != costs.size())
    throw std::invalid_argument("optimal_sample_counts: length mismatch");
  if (!(eps_s > 0.0)) throw std::invalid_argument("eps_s must be positive");
  double sum = 0.0;
  for (std::size_t l = 0; l < costs.size(); ++l) {
    if (!(costs[l] > 0.0)) throw std::invalid_argument("costs must be positive");
    if (!(variances[l] >= 0.0)) throw std::invalid_argument("variances must be >= 0");
    sum += std::sqrt(variances[l] * costs[l]);
  }
  std::vector<std::int64_t> n(costs.size());
  for (std::size_t l = 0; l < costs.size(); ++l) {
    const double raw = sum * std::sqrt(variances[l] / costs[l]) / (eps_s * eps_s);
    // Guard against 200.00000000000003 style round-off pushing ceil up.
    const double r = std::nearbyint(raw);
    const double v = std::abs(raw - r) <= 1e-9 * std::max(1.0, r) ? r : std::ceil(raw);
    n[l] = std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
  }
  return n;
}

double bias_estimate(double y_hat_L, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return std::abs(y_hat_L) / (std::pow(8.0, alpha) - 1.0);
}

bool needs_new_level(double y_hat_L, double alpha, double eps_b) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return std::abs(y_hat_L) > (std::pow(8.0, alpha) - 1.0) * eps_b;
}

double CostPrediction::halving_factor() const { return std::pow(2.0, exponent); }

CostPrediction predict_epsilon_cost(const ConvergenceRates& rates, double eps, EstimatorKind kind) {
  if (!(rates.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  CostPrediction p;
  if (kind == EstimatorKind::mc)
    p.exponent = 2.0 + rates.gamma / rates.alpha;
  else
    p.exponent = 2.0 + std::max(0.0, (rates.gamma - rates.beta) / rates.alpha);
  p.cost = std::pow(eps, -p.exponent);
  return p;
}

}  // namespace mlmc
