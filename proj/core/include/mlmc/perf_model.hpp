#pragma once

// Performance parameters of parallel MLMC runs: machine description,
// per-sample run-time model, strong-scaling efficiency, load imbalance and
// the level efficiency that drive all scheduling decisions.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mlmc/random.hpp"

namespace mlmc::perf {

// Processor budget of the (simulated) machine.
struct MachineConfig {
  std::int64_t p_max = 8192;
  // Processors needed by one coarsest-level sample (memory bound).
  std::int64_t p0_min = 1;
  // Largest scale exponent S of the solver's scalability window.
  int s_window = 4;

  void validate() const;

  // 2^{3 level + theta} * p0_min.
  std::int64_t processors_per_sample(int level, int theta) const;
  bool fits(int level, int theta) const { return processors_per_sample(level, theta) <= p_max; }
};

enum class FactorKind { constant, empirical, half_normal };

// How a simulator draws the per-sample cost factors of one level.
enum class FactorSampling {
  // Each sample draws independently from the distribution.
  independent,
  // Empirical histograms are dealt out without replacement: every run of
  // K consecutive samples uses a fresh random permutation of the K
  // observed run-times. Other kinds fall back to independent draws.
  without_replacement,
};

// Distribution of the stochastic cost factor C(omega) multiplying the
// reference time of a sample.
class RuntimeFactorDistribution {
 public:
  RuntimeFactorDistribution() = default;

  static RuntimeFactorDistribution constant();
  // Observed run-times t_1..t_K; a draw returns t_j K / sum_k t_k.
  static RuntimeFactorDistribution empirical(std::vector<double> runtimes);
  // 1 + |Z| with Z ~ N(0, var): mode at 1.
  static RuntimeFactorDistribution half_normal(double var);

  FactorKind kind() const noexcept { return kind_; }
  const std::vector<double>& histogram() const noexcept { return histogram_; }
  double variance_param() const noexcept { return var_; }

  // Normalized factor of histogram entry j (empirical kind only).
  double normalized(std::size_t j) const;
  double draw(RandomStream& stream) const;
  double mean() const;
  // True when every draw is exactly 1.
  bool is_degenerate() const;

 private:
  FactorKind kind_ = FactorKind::constant;
  std::vector<double> histogram_;
  double histogram_sum_ = 0.0;
  double var_ = 0.0;
};

double draw_cost_factor(const RuntimeFactorDistribution& dist, RandomStream& stream);

// Reference time-to-solution t_{l,theta} per sample plus the cost-factor
// distribution. When a factor distribution is attached, t_{l,theta} is
// the run-time of its mode.
class RunTimeModel {
 public:
  RunTimeModel() = default;
  // Measured matrix: rows are levels, columns scale exponents 0..S.
  explicit RunTimeModel(std::vector<std::vector<double>> t_ref,
                        RuntimeFactorDistribution factors = RuntimeFactorDistribution::constant());

  // t_{l,theta} = t_{l,0} (b + 2^{-theta}(1-b)) for theta = 0..s_window.
  static RunTimeModel from_surrogate(std::span<const double> t_level0, double b, int s_window,
                                     RuntimeFactorDistribution factors =
                                         RuntimeFactorDistribution::constant());

  int levels() const noexcept { return static_cast<int>(t_ref_.size()); }
  int thetas() const noexcept { return t_ref_.empty() ? 0 : static_cast<int>(t_ref_.front().size()); }
  double time(int level, int theta) const;
  const std::vector<std::vector<double>>& matrix() const noexcept { return t_ref_; }
  std::vector<double> column0() const;

  bool is_surrogate() const noexcept { return surrogate_; }
  double serial_fraction() const noexcept { return b_; }
  const RuntimeFactorDistribution& factors() const noexcept { return factors_; }

  RunTimeModel scaled(double c) const;
  RunTimeModel with_factors(RuntimeFactorDistribution factors) const;

 private:
  std::vector<std::vector<double>> t_ref_;
  RuntimeFactorDistribution factors_ = RuntimeFactorDistribution::constant();
  double b_ = 0.0;
  bool surrogate_ = false;
};

// Amdahl-type surrogate t_{l,0} (b + 2^{-theta}(1-b)).
double surrogate_time(double t_l0, double b, int theta);

// Eff_l(theta) = t_{l,0} / (2^theta t_{l,theta}).
double strong_efficiency(double t_l0, double t_ltheta, int theta);

struct LevelMetrics {
  std::int64_t j_parallel = 0;  // concurrent samples J
  std::int64_t k_seq = 0;       // sequential steps
  double imbalance = 0.0;       // Imb in [0,1)
  double eff = 1.0;             // strong efficiency
  double eta = 1.0;             // (1 - Imb) Eff
};

// Level metrics for `n_samples` samples at scale `theta` with a given
// strong efficiency. Throws InfeasibleConfiguration if one sample needs
// more than p_max processors.
LevelMetrics level_metrics(const MachineConfig& machine, int level, std::int64_t n_samples,
                           int theta, double eff);
// Same, with Eff taken from the model's reference times.
LevelMetrics level_metrics(const MachineConfig& machine, int level, std::int64_t n_samples,
                           int theta, const RunTimeModel& model);

// Lower bound (p0_min / p_max) sum_l N_l 2^{3l} E[C_{l,0}] t_{l,0}.
double theoretical_optimum(const MachineConfig& machine, std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level,
                           std::span<const double> mean_factor);
double theoretical_optimum(const MachineConfig& machine, std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level);

struct ImbalanceGap {
  double delta_t = 0.0;        // runtime / optimum - 1
  double bound = 0.0;          // (t_{L,0}/t_{0,0}) (L+1) / k_seq_global
  double k_seq_global = 0.0;   // sum_l N_l 2^{3l} p0_min / p_max
  bool within_bound() const { return delta_t <= bound * (1.0 + 1e-12); }
};

ImbalanceGap imbalance_gap(const MachineConfig& machine, double runtime, double optimum,
                           std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level);

// Least-squares serial fraction b in [0,1] from (theta, time) pairs.
// With theta = 0 measurements present, t/t_0 is fitted against
// b + 2^{-theta}(1-b); otherwise t_0 is fitted jointly.
double fit_serial_fraction(std::span<const std::pair<int, double>> measured);

}  // namespace mlmc::perf
