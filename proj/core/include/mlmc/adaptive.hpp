#pragma once

// Adaptive MLMC control loop: top up samples, update statistics,
// recompute the quasi-optimal N_l, add a level when the bias estimate is
// too large, until nothing changes.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlmc/estimator.hpp"
#include "mlmc/executor.hpp"
#include "mlmc/samplers.hpp"

namespace mlmc {

enum class EpsilonMode {
  // eps_s^2 = w eps^2, eps_b^2 = (1-w) eps^2.
  fixed_split,
  // eps_s tracks the current bias estimate, clamped to [eps/10, eps].
  balance,
};

struct AdaptiveOptions {
  Tolerance tol;
  double alpha = 1.0 / 3.0;
  std::int64_t n_init = 16;
  // Optional per-level starting counts (overrides n_init where given).
  std::vector<std::int64_t> initial_n;
  // Number of levels to start with (Alg.: L = 1, i.e. two levels).
  int initial_levels = 2;
  int max_iterations = 100;
  EpsilonMode eps_mode = EpsilonMode::fixed_split;
  // Divide by N-1 instead of N.
  bool unbiased_variance = false;
};

// What the scheduler decided for one top-up batch.
struct BatchPlan {
  std::vector<std::int64_t> to_compute;  // >= requested, per level
  double makespan = 0.0;                 // simulated seconds
};

// Maps requested new samples (and current per-sample cost estimates) to
// what actually runs. Without one, exactly the requested samples run and
// the batch time is their summed duration.
using BatchScheduler =
    std::function<BatchPlan(std::span<const std::int64_t> requested, std::span<const double> cost)>;

struct IterationSnapshot {
  int L = 0;
  std::vector<std::int64_t> n_target;
  std::vector<std::int64_t> n_taken;
  double estimate = 0.0;
  double bias = 0.0;
  double sampling_variance = 0.0;
  double batch_time = 0.0;
};

struct MlmcResult {
  double estimate = 0.0;
  std::vector<LevelStats> levels;
  std::vector<std::int64_t> final_n;
  int final_L = 0;
  std::vector<IterationSnapshot> history;
  double bias = 0.0;
  double sampling_variance = 0.0;
  double simulated_time = 0.0;
  // A further level was requested but the backend has none.
  bool truncated = false;
  bool converged = false;
};

class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, MlmcResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const MlmcResult& partial() const noexcept { return partial_; }

 private:
  MlmcResult partial_;
};

MlmcResult run_adaptive(const SampleBackend& backend, const RandomStream& root,
                        const AdaptiveOptions& options, const SampleExecutor& executor = SampleExecutor{},
                        const BatchScheduler& scheduler = {});

}  // namespace mlmc
