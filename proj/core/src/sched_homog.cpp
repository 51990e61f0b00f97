#include "mlmc/sched_homog.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"

namespace mlmc::sched {
namespace {

constexpr double kTieTol = 1e-12;

bool less_than(double a, double b) { return a < b * (1.0 - kTieTol); }

std::int64_t k_seq_of(const perf::MachineConfig& m, int level, int theta, std::int64_t n) {
  const std::int64_t j = m.p_max / m.processors_per_sample(level, theta);
  return (n + j - 1) / j;
}

}  // namespace

double ThetaChoice::total() const { return std::accumulate(predicted.begin(), predicted.end(), 0.0); }

int max_feasible_theta(int level, const perf::MachineConfig& machine,
                       const perf::RunTimeModel& model) {
  machine.validate();
  if (level < 0 || level >= model.levels())
    throw std::invalid_argument("level " + std::to_string(level) + " not in run-time model");
  if (!machine.fits(level, 0))
    throw InfeasibleConfiguration("level " + std::to_string(level) +
                                  " does not fit on the machine even at theta 0");
  int s = std::min(machine.s_window, model.thetas() - 1);
  while (s > 0 && !machine.fits(level, s)) --s;
  return s;
}

int select_theta(int level, std::int64_t n_samples, const perf::MachineConfig& machine,
                 const perf::RunTimeModel& model) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int s = max_feasible_theta(level, machine, model);
  int best = 0;
  double best_t = std::numeric_limits<double>::infinity();
  for (int th = 0; th <= s; ++th) {
    const double t = static_cast<double>(k_seq_of(machine, level, th, n_samples)) * model.time(level, th);
    if (!less_than(best_t, t)) {  // t <= best_t up to round-off: larger theta wins ties
      best = th;
      best_t = std::min(best_t, t);
    }
  }
  return best;
}

ThetaChoice select_thetas(std::span<const std::int64_t> n_per_level,
                          const perf::MachineConfig& machine, const perf::RunTimeModel& model,
                          SelectionMode mode) {
  if (mode == SelectionMode::robust)
    throw std::invalid_argument("robust selection needs a factor distribution");
  ThetaChoice c;
  c.mode = mode;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    const int level = static_cast<int>(l);
    const int th = select_theta(level, n_per_level[l], machine, model);
    c.theta.push_back(th);
    c.predicted.push_back(static_cast<double>(k_seq_of(machine, level, th, n_per_level[l])) *
                          model.time(level, th));
  }
  return c;
}

double expected_makespan(int level, int theta, std::int64_t n_samples,
                         const perf::MachineConfig& machine, const perf::RunTimeModel& model,
                         const perf::RuntimeFactorDistribution& factors, int mu,
                         RandomStream stream) {
  if (mu < 1) throw std::invalid_argument("mu must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!machine.fits(level, theta)) throw InfeasibleConfiguration("theta does not fit on machine");
  const std::int64_t j = machine.p_max / machine.processors_per_sample(level, theta);
  const std::int64_t k = (n_samples + j - 1) / j;
  const double t = model.time(level, theta);
  if (factors.is_degenerate()) return static_cast<double>(k) * t;
  double acc = 0.0;
  for (int r = 0; r < mu; ++r) {
    double worst = 0.0;
    for (std::int64_t b = 0; b < j; ++b) {
      double sum = 0.0;
      for (std::int64_t s = 0; s < k; ++s) sum += factors.draw(stream);
      worst = std::max(worst, sum);
    }
    acc += worst;
  }
  return acc / mu * t;
}

RobustSelection select_theta_robust(int level, std::int64_t n_samples,
                                    const perf::MachineConfig& machine,
                                    const perf::RunTimeModel& model,
                                    const perf::RuntimeFactorDistribution& factors,
                                    const RandomStream& stream, int mu_start, int mu_cap) {
  if (mu_start < 1 || mu_cap < mu_start) throw std::invalid_argument("invalid mu range");
  const int s = max_feasible_theta(level, machine, model);
  RobustSelection out;
  if (factors.is_degenerate()) {
    out.theta = select_theta(level, n_samples, machine, model);
    out.mu = 0;
    for (int th = 0; th <= s; ++th)
      out.estimates.push_back(static_cast<double>(k_seq_of(machine, level, th, n_samples)) *
                              model.time(level, th));
    return out;
  }
  auto pick = [&](int mu, std::vector<double>& est) {
    est.assign(static_cast<std::size_t>(s) + 1, 0.0);
    int best = 0;
    for (int th = 0; th <= s; ++th) {
      est[static_cast<std::size_t>(th)] =
          expected_makespan(level, th, n_samples, machine, model, factors, mu,
                            stream.split(static_cast<std::uint64_t>(level))
                                .split(static_cast<std::uint64_t>(th))
                                .split(static_cast<std::uint64_t>(mu)));
      if (!less_than(est[static_cast<std::size_t>(best)], est[static_cast<std::size_t>(th)])) best = th;
    }
    return best;
  };
  std::vector<double> est;
  int mu = mu_start;
  int prev = pick(mu, est);
  while (mu < mu_cap) {
    mu = std::min(mu * 2, mu_cap);
    const int cur = pick(mu, est);
    if (cur == prev) break;
    prev = cur;
  }
  out.theta = prev;
  out.mu = mu;
  out.estimates = std::move(est);
  return out;
}

ThetaChoice select_thetas_robust(std::span<const std::int64_t> n_per_level,
                                 const perf::MachineConfig& machine,
                                 const perf::RunTimeModel& model,
                                 const perf::RuntimeFactorDistribution& factors,
                                 const RandomStream& stream, int mu_start, int mu_cap) {
  ThetaChoice c;
  c.mode = SelectionMode::robust;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    const auto r = select_theta_robust(static_cast<int>(l), n_per_level[l], machine, model, factors,
                                       stream, mu_start, mu_cap);
    c.theta.push_back(r.theta);
    c.predicted.push_back(r.estimates.at(static_cast<std::size_t>(r.theta)));
  }
  return c;
}

double StaticSchedule::predicted_time() const {
  double t = 0.0;
  for (const auto& l : levels) t += l.predicted_time();
  return t;
}

StaticSchedule build_static_schedule(const ThetaChoice& choice,
                                     std::span<const std::int64_t> n_per_level,
                                     const perf::MachineConfig& machine,
                                     const perf::RunTimeModel& model) {
  machine.validate();
  if (choice.theta.size() != n_per_level.size())
    throw std::invalid_argument("theta choice and sample counts differ in length");
  StaticSchedule s;
  s.p_max = machine.p_max;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    const int level = static_cast<int>(l);
    const int th = choice.theta[l];
    if (n_per_level[l] < 1) throw std::invalid_argument("every level needs >= 1 sample");
    if (!machine.fits(level, th))
      throw InfeasibleConfiguration("level " + std::to_string(level) + " theta " +
                                    std::to_string(th) + " exceeds p_max");
    StaticLevelSchedule ls;
    ls.level = level;
    ls.theta = th;
    ls.n_required = n_per_level[l];
    ls.processors_per_block = machine.processors_per_sample(level, th);
    ls.blocks = machine.p_max / ls.processors_per_block;
    ls.k_seq = (ls.n_required + ls.blocks - 1) / ls.blocks;
    ls.t_sample = model.time(level, th);
    ls.block_samples.resize(static_cast<std::size_t>(ls.blocks));
    for (std::int64_t b = 0; b < ls.blocks; ++b) {
      auto& v = ls.block_samples[static_cast<std::size_t>(b)];
      v.reserve(static_cast<std::size_t>(ls.k_seq));
      for (std::int64_t st = 0; st < ls.k_seq; ++st) v.push_back(st * ls.blocks + b);
    }
    s.levels.push_back(std::move(ls));
  }
  return s;
}

}  // namespace mlmc::sched
