#include "mlmc/executor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace mlmc {

unsigned resolve_jobs(unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  return jobs;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = resolve_jobs(jobs);
  if (n == 0) return;
  if (jobs == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto threads = std::min<std::size_t>(jobs, n);
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::vector<SampleRecord> SampleExecutor::run(const SampleBackend& backend, int level,
                                              std::int64_t first, std::int64_t count,
                                              const RandomStream& root) const {
  std::vector<SampleRecord> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  parallel_for(out.size(), jobs_, [&](std::size_t i) {
    out[i] = backend_draw(backend, level, first + static_cast<std::int64_t>(i), root);
  });
  return out;
}

}  // namespace mlmc
