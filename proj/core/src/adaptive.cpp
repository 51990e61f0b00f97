#include "mlmc/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace mlmc {
namespace {

struct LevelData {
  std::vector<double> y;  // ordered by sample index
  double duration_sum = 0.0;
};

LevelStats summarize(const LevelData& d, bool unbiased) {
  LevelStats s;
  s.n = static_cast<std::int64_t>(d.y.size());
  if (s.n > 0) {
    const auto st = mc_statistics(d.y, unbiased);
    s.mean = st.mean;
    s.s2 = st.s2;
    s.cost = d.duration_sum / static_cast<double>(s.n);
  }
  return s;
}

}  // namespace

MlmcResult run_adaptive(const SampleBackend& backend, const RandomStream& root,
                        const AdaptiveOptions& opt, const SampleExecutor& executor,
                        const BatchScheduler& scheduler) {
  if (opt.n_init < 2) throw std::invalid_argument("n_init must be >= 2");
  if (!(opt.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (opt.initial_levels < 1) throw std::invalid_argument("initial_levels must be >= 1");
  const double eps = opt.tol.eps;
  const double eps_b = opt.tol.eps_bias();

  int L = std::min(opt.initial_levels - 1, backend.max_level());
  auto initial = [&](int l) {
    const auto i = static_cast<std::size_t>(l);
    return i < opt.initial_n.size() ? std::max<std::int64_t>(1, opt.initial_n[i]) : opt.n_init;
  };

  std::vector<std::int64_t> target;
  for (int l = 0; l <= L; ++l) target.push_back(initial(l));
  std::vector<LevelData> data(target.size());
  MlmcResult result;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // (a) top up to the current targets; extra samples are kept.
    std::vector<std::int64_t> requested(target.size());
    std::vector<double> cost_est(target.size());
    for (std::size_t l = 0; l < target.size(); ++l) {
      requested[l] = std::max<std::int64_t>(0, target[l] - static_cast<std::int64_t>(data[l].y.size()));
      const auto n = data[l].y.size();
      cost_est[l] = n ? data[l].duration_sum / static_cast<double>(n)
                      : (l > 0 && !data[l - 1].y.empty()
                             ? 8.0 * data[l - 1].duration_sum / static_cast<double>(data[l - 1].y.size())
                             : 1.0);
    }
    std::vector<std::int64_t> to_compute = requested;
    double batch_time = 0.0;
    if (scheduler) {
      BatchPlan plan = scheduler(requested, cost_est);
      if (plan.to_compute.size() != requested.size())
        throw std::logic_error("scheduler returned wrong level count");
      for (std::size_t l = 0; l < requested.size(); ++l)
        to_compute[l] = std::max(requested[l], plan.to_compute[l]);
      batch_time = plan.makespan;
    }
    for (std::size_t l = 0; l < target.size(); ++l) {
      if (to_compute[l] == 0) continue;
      const auto first = static_cast<std::int64_t>(data[l].y.size());
      auto recs = executor.run(backend, static_cast<int>(l), first, to_compute[l], root);
      for (const auto& r : recs) {
        data[l].y.push_back(r.y_value);
        data[l].duration_sum += r.duration;
        if (!scheduler) batch_time += r.duration;
      }
    }
    result.simulated_time += batch_time;

    // (b) statistics.
    result.levels.clear();
    for (const auto& d : data) result.levels.push_back(summarize(d, opt.unbiased_variance));
    const auto comb = mlmc_combine(result.levels);
    const double y_L = result.levels.back().mean;
    const double bias = L > 0 ? bias_estimate(y_L, opt.alpha) : std::abs(y_L);

    // (c) quasi-optimal counts.
    double eps_s = opt.tol.eps_sampling();
    if (opt.eps_mode == EpsilonMode::balance)
      eps_s = std::clamp(bias, eps / 10.0, eps);
    std::vector<double> v, c;
    for (const auto& s : result.levels) {
      v.push_back(s.s2);
      c.push_back(std::max(s.cost, 1e-300));
    }
    const auto optimal = optimal_sample_counts(v, c, eps_s);
    bool more_samples = false;
    for (std::size_t l = 0; l < target.size(); ++l) {
      target[l] = std::max(optimal[l], static_cast<std::int64_t>(data[l].y.size()));
      if (optimal[l] > static_cast<std::int64_t>(data[l].y.size())) more_samples = true;
    }

    IterationSnapshot snap;
    snap.L = L;
    snap.n_target = target;
    for (const auto& d : data) snap.n_taken.push_back(static_cast<std::int64_t>(d.y.size()));
    snap.estimate = comb.estimate;
    snap.bias = bias;
    snap.sampling_variance = comb.sampling_variance;
    snap.batch_time = batch_time;
    result.history.push_back(snap);

    result.estimate = comb.estimate;
    result.bias = bias;
    result.sampling_variance = comb.sampling_variance;
    result.final_L = L;
    result.final_n = snap.n_taken;

    // (d) new level?
    bool new_level = false;
    if (L > 0 && needs_new_level(y_L, opt.alpha, eps_b)) {
      if (L < backend.max_level()) {
        ++L;
        target.push_back(initial(L));
        data.emplace_back();
        new_level = true;
      } else {
        result.truncated = true;
      }
    }
    if (!more_samples && !new_level) {
      result.converged = true;
      return result;
    }
  }
  throw NotConverged("adaptive MLMC did not settle within " + std::to_string(opt.max_iterations) +
                         " iterations",
                     result);
}

}  // namespace mlmc
