#pragma once

// Homogeneous bulk-synchronous scheduling: one scale exponent per level,
// all blocks of a level the same size, levels run one after the other.

#include <cstdint>
#include <span>
#include <vector>

#include "mlmc/perf_model.hpp"
#include "mlmc/random.hpp"

namespace mlmc::sched {

enum class SelectionMode { sample_sync, level_sync, robust };

struct ThetaChoice {
  std::vector<int> theta;
  SelectionMode mode = SelectionMode::level_sync;
  // Predicted level times k_seq t_{l,theta} (robust: the estimate E-hat).
  std::vector<double> predicted;
  double total() const;
};

// Largest usable theta: min(S, model columns - 1), further limited by p_max.
int max_feasible_theta(int level, const perf::MachineConfig& machine, const perf::RunTimeModel& model);

// argmin_theta k_seq(theta) t_{l,theta}; ties go to the largest theta.
int select_theta(int level, std::int64_t n_samples, const perf::MachineConfig& machine,
                 const perf::RunTimeModel& model);

ThetaChoice select_thetas(std::span<const std::int64_t> n_per_level,
                          const perf::MachineConfig& machine, const perf::RunTimeModel& model,
                          SelectionMode mode = SelectionMode::level_sync);

// Monte Carlo estimate of the expected level makespan: mean over `mu`
// replications of the slowest block's summed factors, times t_{l,theta}.
double expected_makespan(int level, int theta, std::int64_t n_samples,
                         const perf::MachineConfig& machine, const perf::RunTimeModel& model,
                         const perf::RuntimeFactorDistribution& factors, int mu,
                         RandomStream stream);

struct RobustSelection {
  int theta = 0;
  int mu = 0;                      // replications actually used
  std::vector<double> estimates;   // E-hat per theta at the final mu
};

// argmin_theta E-hat(mu); mu doubles from mu_start until mu and mu/2 pick
// the same theta or mu_cap is reached.
RobustSelection select_theta_robust(int level, std::int64_t n_samples,
                                    const perf::MachineConfig& machine,
                                    const perf::RunTimeModel& model,
                                    const perf::RuntimeFactorDistribution& factors,
                                    const RandomStream& stream, int mu_start = 64,
                                    int mu_cap = 512);

ThetaChoice select_thetas_robust(std::span<const std::int64_t> n_per_level,
                                 const perf::MachineConfig& machine,
                                 const perf::RunTimeModel& model,
                                 const perf::RuntimeFactorDistribution& factors,
                                 const RandomStream& stream, int mu_start = 64, int mu_cap = 512);

struct StaticLevelSchedule {
  int level = 0;
  int theta = 0;
  std::int64_t n_required = 0;
  std::int64_t blocks = 0;  // J
  std::int64_t processors_per_block = 0;
  std::int64_t k_seq = 0;
  double t_sample = 0.0;    // t_{l,theta}
  // Sample indices per block; step s of block b runs index s J + b.
  std::vector<std::vector<std::int64_t>> block_samples;

  std::int64_t oversampling() const { return k_seq * blocks - n_required; }
  double predicted_time() const { return static_cast<double>(k_seq) * t_sample; }
};

struct StaticSchedule {
  std::int64_t p_max = 0;
  std::vector<StaticLevelSchedule> levels;
  double predicted_time() const;
};

StaticSchedule build_static_schedule(const ThetaChoice& choice,
                                     std::span<const std::int64_t> n_per_level,
                                     const perf::MachineConfig& machine,
                                     const perf::RunTimeModel& model);

}  // namespace mlmc::sched
