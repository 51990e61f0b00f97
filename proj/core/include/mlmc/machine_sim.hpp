#pragma once

// Discrete-event simulation of time-processor diagrams. Every sample is a
// rectangle: a block of processors busy for t_{l,theta} times a drawn cost
// factor.

#include <cstdint>
#include <optional>
#include <vector>

#include "mlmc/perf_model.hpp"
#include "mlmc/random.hpp"
#include "mlmc/sched_hetero.hpp"
#include "mlmc/sched_homog.hpp"

namespace mlmc::sim {

enum class ExecutionKind {
  // Barrier after every sequential step.
  static_sample_sync,
  // Blocks run their k_seq samples back to back; barrier per level.
  static_level_sync,
  // Blocks claim the next sample of their level from a shared counter.
  dynamic,
};

struct ExecutionMode {
  ExecutionKind kind = ExecutionKind::static_level_sync;
  perf::FactorSampling sampling = perf::FactorSampling::independent;
  // Seconds added to every dynamic claim (counter round trip).
  double claim_latency = 0.0;
  bool record_timeline = true;
};

struct TimelineInterval {
  std::int64_t block = 0;
  std::int64_t processor_offset = 0;  // first processor of the block
  std::int64_t processors = 0;
  int level = 0;
  int theta = 0;
  std::int64_t sample = 0;
  double start = 0.0;
  double end = 0.0;
};

struct SimReport {
  std::int64_t p_max = 0;
  double makespan = 0.0;
  double busy_processor_seconds = 0.0;
  double idle_fraction = 0.0;
  std::vector<std::int64_t> required;
  std::vector<std::int64_t> computed;
  std::vector<std::int64_t> oversampled;
  // Wall time per level (homogeneous) or last completion per level
  // (heterogeneous).
  std::vector<double> level_time;
  std::vector<TimelineInterval> timeline;
};

// Deterministic per-sample cost factors keyed by (level, sample index).
class FactorSource {
 public:
  FactorSource(const perf::RuntimeFactorDistribution& dist, perf::FactorSampling sampling,
               RandomStream stream);
  double operator()(int level, std::int64_t index);

 private:
  const perf::RuntimeFactorDistribution& dist_;
  perf::FactorSampling sampling_;
  RandomStream stream_;
  // level -> chunk -> permutation of histogram indices
  std::vector<std::vector<std::vector<std::uint32_t>>> perms_;
};

// Homogeneous schedule: levels one after the other.
SimReport simulate(const sched::StaticSchedule& schedule, const perf::RunTimeModel& model,
                   const ExecutionMode& mode, RandomStream stream);

// Heterogeneous schedule: all levels concurrently. Static modes use the
// k_seq of the matrix; dynamic mode lets every block of a level draw from
// that level's counter.
SimReport simulate(const sched::ScheduleMatrix& schedule, const sched::HeteroProblem& problem,
                   const ExecutionMode& mode, RandomStream stream);

struct EfficiencyMetrics {
  double efficiency = 0.0;  // optimum / makespan
  std::vector<double> level_eta;
  std::vector<std::int64_t> oversampled;
};

EfficiencyMetrics efficiency_report(const SimReport& report, double optimum,
                                    const std::vector<double>& level_optimum = {});

}  // namespace mlmc::sim
