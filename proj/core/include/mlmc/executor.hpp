#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mlmc/samplers.hpp"

namespace mlmc {

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware
// concurrency). The first exception thrown by any task is rethrown after
// all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

unsigned resolve_jobs(unsigned jobs);

// Computes batches of samples on a worker pool. Results come back ordered
// by sample index, so reductions never depend on thread interleaving.
class SampleExecutor {
 public:
  explicit SampleExecutor(unsigned jobs = 1) : jobs_(resolve_jobs(jobs)) {}

  std::vector<SampleRecord> run(const SampleBackend& backend, int level, std::int64_t first,
                                std::int64_t count, const RandomStream& root) const;

  unsigned jobs() const noexcept { return jobs_; }

 private:
  unsigned jobs_;
};

}  // namespace mlmc
