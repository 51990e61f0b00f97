#include "mlmc/machine_sim.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "mlmc/errors.hpp"

namespace mlmc::sim {

FactorSource::FactorSource(const perf::RuntimeFactorDistribution& dist,
                           perf::FactorSampling sampling, RandomStream stream)
    : dist_(dist), sampling_(sampling), stream_(stream) {}

double FactorSource::operator()(int level, std::int64_t index) {
  if (dist_.kind() == perf::FactorKind::constant) return 1.0;
  if (sampling_ == perf::FactorSampling::without_replacement &&
      dist_.kind() == perf::FactorKind::empirical) {
    const auto K = static_cast<std::int64_t>(dist_.histogram().size());
    const auto chunk = static_cast<std::size_t>(index / K);
    const auto lv = static_cast<std::size_t>(level);
    if (perms_.size() <= lv) perms_.resize(lv + 1);
    auto& chunks = perms_[lv];
    if (chunks.size() <= chunk) chunks.resize(chunk + 1);
    auto& perm = chunks[chunk];
    if (perm.empty()) {
      perm.resize(static_cast<std::size_t>(K));
      std::iota(perm.begin(), perm.end(), 0u);
      RandomStream rs = stream_.split(0x9E7).split(lv).split(chunk);
      std::shuffle(perm.begin(), perm.end(), rs);
    }
    return dist_.normalized(perm[static_cast<std::size_t>(index % K)]);
  }
  RandomStream rs = stream_.split(static_cast<std::uint64_t>(level)).split(static_cast<std::uint64_t>(index));
  return dist_.draw(rs);
}

namespace {

struct Block {
  int level = 0;
  int theta = 0;
  std::int64_t processors = 0;
  std::int64_t offset = 0;
  double t_sample = 0.0;
  std::vector<std::int64_t> samples;  // static modes
};

struct Recorder {
  SimReport& rep;
  bool keep;
  void add(std::int64_t block, const Block& b, std::int64_t sample, double start, double end) {
    rep.busy_processor_seconds += static_cast<double>(b.processors) * (end - start);
    if (keep)
      rep.timeline.push_back({block, b.offset, b.processors, b.level, b.theta, sample, start, end});
  }
};

// Runs blocks that all start at `start`, each claiming samples of its level
// from a shared counter. Returns per-level completion times.
void run_dynamic(const std::vector<Block>& blocks, std::int64_t block_id_base,
                 std::vector<std::int64_t>& claimed, const std::vector<std::int64_t>& target,
                 double start, double latency, FactorSource& factors, Recorder& rec,
                 std::vector<double>& level_end) {
  using Event = std::pair<double, std::size_t>;  // (time, block) ordered lexicographically
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  for (std::size_t b = 0; b < blocks.size(); ++b) queue.emplace(start, b);
  while (!queue.empty()) {
    const auto [now, b] = queue.top();
    queue.pop();
    const Block& blk = blocks[b];
    const auto lv = static_cast<std::size_t>(blk.level);
    if (claimed[lv] >= target[lv]) continue;
    const std::int64_t idx = claimed[lv]++;
    const double s = now + latency;
    const double e = s + blk.t_sample * factors(blk.level, idx);
    rec.add(block_id_base + static_cast<std::int64_t>(b), blk, idx, s, e);
    level_end[lv] = std::max(level_end[lv], e);
    queue.emplace(e, b);
  }
}

void finish(SimReport& rep) {
  rep.oversampled.resize(rep.required.size());
  for (std::size_t l = 0; l < rep.required.size(); ++l)
    rep.oversampled[l] = rep.computed[l] - rep.required[l];
  rep.idle_fraction = rep.makespan > 0.0
                          ? 1.0 - rep.busy_processor_seconds /
                                      (static_cast<double>(rep.p_max) * rep.makespan)
                          : 0.0;
}

}  // namespace

SimReport simulate(const sched::StaticSchedule& schedule, const perf::RunTimeModel& model,
                   const ExecutionMode& mode, RandomStream stream) {
  SimReport rep;
  rep.p_max = schedule.p_max;
  const auto nlev = schedule.levels.size();
  rep.required.assign(nlev, 0);
  rep.computed.assign(nlev, 0);
  rep.level_time.assign(nlev, 0.0);
  FactorSource factors(model.factors(), mode.sampling, stream);
  Recorder rec{rep, mode.record_timeline};

  double now = 0.0;
  std::int64_t block_base = 0;
  for (std::size_t li = 0; li < nlev; ++li) {
    const auto& ls = schedule.levels[li];
    if (ls.blocks * ls.processors_per_block > schedule.p_max)
      throw InfeasibleConfiguration("level schedule exceeds p_max");
    rep.required[li] = ls.n_required;
    std::vector<Block> blocks(static_cast<std::size_t>(ls.blocks));
    for (std::int64_t b = 0; b < ls.blocks; ++b) {
      auto& blk = blocks[static_cast<std::size_t>(b)];
      blk.level = ls.level;
      blk.theta = ls.theta;
      blk.processors = ls.processors_per_block;
      blk.offset = b * ls.processors_per_block;
      blk.t_sample = ls.t_sample;
      blk.samples = ls.block_samples.at(static_cast<std::size_t>(b));
    }
    const double level_start = now;
    switch (mode.kind) {
      case ExecutionKind::static_sample_sync: {
        for (std::int64_t s = 0; s < ls.k_seq; ++s) {
          double step = 0.0;
          for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto idx = blocks[b].samples.at(static_cast<std::size_t>(s));
            const double d = ls.t_sample * factors(ls.level, idx);
            rec.add(block_base + static_cast<std::int64_t>(b), blocks[b], idx, now, now + d);
            step = std::max(step, d);
          }
          now += step;
        }
        rep.computed[li] = ls.k_seq * ls.blocks;
        break;
      }
      case ExecutionKind::static_level_sync: {
        double end = now;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          double t = now;
          for (auto idx : blocks[b].samples) {
            const double d = ls.t_sample * factors(ls.level, idx);
            rec.add(block_base + static_cast<std::int64_t>(b), blocks[b], idx, t, t + d);
            t += d;
          }
          end = std::max(end, t);
        }
        now = end;
        rep.computed[li] = ls.k_seq * ls.blocks;
        break;
      }
      case ExecutionKind::dynamic: {
        std::vector<std::int64_t> claimed(nlev, 0), target(nlev, 0);
        target[static_cast<std::size_t>(ls.level)] = ls.n_required;
        std::vector<double> level_end(nlev, now);
        run_dynamic(blocks, block_base, claimed, target, now, mode.claim_latency, factors, rec,
                    level_end);
        now = level_end[static_cast<std::size_t>(ls.level)];
        rep.computed[li] = claimed[static_cast<std::size_t>(ls.level)];
        break;
      }
    }
    rep.level_time[li] = now - level_start;
    block_base += ls.blocks;
  }
  rep.makespan = now;
  finish(rep);
  return rep;
}

SimReport simulate(const sched::ScheduleMatrix& schedule, const sched::HeteroProblem& problem,
                   const ExecutionMode& mode, RandomStream stream) {
  if (!sched::satisfies_constraints(schedule.n_par, problem))
    throw InfeasibleConfiguration("heterogeneous schedule violates its constraints");
  const auto nlev = static_cast<std::size_t>(problem.levels());
  SimReport rep;
  rep.p_max = problem.machine.p_max;
  rep.required = problem.n_per_level;
  rep.computed.assign(nlev, 0);
  rep.level_time.assign(nlev, 0.0);
  FactorSource factors(problem.model.factors(), mode.sampling, stream);
  Recorder rec{rep, mode.record_timeline};

  std::vector<Block> blocks;
  std::vector<std::vector<std::size_t>> level_blocks(nlev);
  std::vector<std::vector<std::int64_t>> block_steps(nlev);
  std::int64_t offset = 0;
  for (int l = 0; l < problem.levels(); ++l)
    for (int t = 0; t <= problem.s(); ++t) {
      const auto n = schedule.n_par[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
      const auto k = schedule.k_seq.empty()
                         ? 0
                         : schedule.k_seq[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
      for (std::int64_t i = 0; i < n; ++i) {
        Block b;
        b.level = l;
        b.theta = t;
        b.processors = problem.machine.processors_per_sample(l, t);
        b.offset = offset;
        b.t_sample = problem.model.time(l, t);
        offset += b.processors;
        level_blocks[static_cast<std::size_t>(l)].push_back(blocks.size());
        block_steps[static_cast<std::size_t>(l)].push_back(k);
        blocks.push_back(std::move(b));
      }
    }

  if (mode.kind == ExecutionKind::dynamic) {
    std::vector<std::int64_t> claimed(nlev, 0);
    run_dynamic(blocks, 0, claimed, problem.n_per_level, 0.0, mode.claim_latency, factors, rec,
                rep.level_time);
    rep.computed = claimed;
  } else {
    if (schedule.k_seq.size() != nlev)
      throw std::invalid_argument("static heterogeneous simulation needs k_seq");
    // Column-major indices per level: step s of every block that has one.
    for (std::size_t l = 0; l < nlev; ++l) {
      const auto& ids = level_blocks[l];
      const auto& ks = block_steps[l];
      const std::int64_t kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
      std::int64_t idx = 0;
      for (std::int64_t s = 0; s < kmax; ++s)
        for (std::size_t j = 0; j < ids.size(); ++j)
          if (ks[j] > s) blocks[ids[j]].samples.push_back(idx++);
      rep.computed[l] = idx;
      if (idx < problem.n_per_level[l])
        throw InfeasibleConfiguration("k_seq does not cover the required samples");
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      double t = 0.0;
      for (auto idx : blocks[b].samples) {
        const double d = blocks[b].t_sample * factors(blocks[b].level, idx);
        rec.add(static_cast<std::int64_t>(b), blocks[b], idx, t, t + d);
        t += d;
      }
      auto& lt = rep.level_time[static_cast<std::size_t>(blocks[b].level)];
      lt = std::max(lt, t);
    }
  }
  rep.makespan = rep.level_time.empty() ? 0.0 : *std::max_element(rep.level_time.begin(), rep.level_time.end());
  finish(rep);
  return rep;
}

EfficiencyMetrics efficiency_report(const SimReport& report, double optimum,
                                    const std::vector<double>& level_optimum) {
  if (!(optimum > 0.0)) throw std::invalid_argument("optimum must be positive");
  EfficiencyMetrics m;
  m.efficiency = report.makespan > 0.0 ? optimum / report.makespan : 0.0;
  m.oversampled = report.oversampled;
  if (!level_optimum.empty()) {
    if (level_optimum.size() != report.level_time.size())
      throw std::invalid_argument("level optimum length mismatch");
    for (std::size_t l = 0; l < level_optimum.size(); ++l)
      m.level_eta.push_back(report.level_time[l] > 0.0 ? level_optimum[l] / report.level_time[l] : 0.0);
  }
  return m;
}

}  // namespace mlmc::sim
