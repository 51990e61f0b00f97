#include "mlmc/sched_hetero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mlmc/errors.hpp"

namespace mlmc::sched {
namespace {

constexpr double kTimeTol = 1e-9;

std::int64_t steps_within(double T, double t) {
  return static_cast<std::int64_t>(std::floor(T / t + kTimeTol));
}

bool same_time(double a, double b) { return std::abs(a - b) <= kTimeTol * std::max(1.0, std::abs(b)); }

std::int64_t row_sum(const std::vector<std::int64_t>& row) {
  std::int64_t s = 0;
  for (auto v : row) s += v;
  return s;
}

int row_nonzero(const std::vector<std::int64_t>& row) {
  return static_cast<int>(std::count_if(row.begin(), row.end(), [](auto v) { return v != 0; }));
}

}  // namespace

int HeteroProblem::s() const { return std::max(0, std::min(machine.s_window, model.thetas() - 1)); }

bool HeteroProblem::is_required(int level) const {
  if (required.empty()) return true;
  return required.at(static_cast<std::size_t>(level));
}

void HeteroProblem::validate() const {
  machine.validate();
  if (n_per_level.empty()) throw std::invalid_argument("no levels");
  if (model.levels() < levels()) throw std::invalid_argument("run-time model has too few levels");
  if (!required.empty() && required.size() != n_per_level.size())
    throw std::invalid_argument("required flags length mismatch");
  for (auto n : n_per_level)
    if (n < 0) throw std::invalid_argument("negative sample count");
}

std::int64_t gene_bound(const perf::MachineConfig& machine, int level, int theta) {
  const auto per = machine.processors_per_sample(level, theta);
  return per > machine.p_max ? 0 : machine.p_max / per;
}

std::int64_t processors_used(const Genes& genes, const perf::MachineConfig& machine) {
  std::int64_t used = 0;
  for (std::size_t l = 0; l < genes.size(); ++l)
    for (std::size_t t = 0; t < genes[l].size(); ++t)
      if (genes[l][t] != 0)
        used += genes[l][t] * machine.processors_per_sample(static_cast<int>(l), static_cast<int>(t));
  return used;
}

Genes zero_genes(const HeteroProblem& problem) {
  return Genes(static_cast<std::size_t>(problem.levels()),
               std::vector<std::int64_t>(static_cast<std::size_t>(problem.s()) + 1, 0));
}

bool satisfies_constraints(const Genes& genes, const HeteroProblem& problem) {
  if (static_cast<int>(genes.size()) != problem.levels()) return false;
  for (int l = 0; l < problem.levels(); ++l) {
    const auto& row = genes[static_cast<std::size_t>(l)];
    if (static_cast<int>(row.size()) != problem.s() + 1) return false;
    for (int t = 0; t <= problem.s(); ++t) {
      const auto g = row[static_cast<std::size_t>(t)];
      if (g < 0 || g > gene_bound(problem.machine, l, t)) return false;
    }
    if (problem.is_required(l) && row_sum(row) == 0) return false;
  }
  return processors_used(genes, problem.machine) <= problem.machine.p_max;
}

InitialGuess initial_guess_s0(std::span<const std::int64_t> n_per_level,
                              std::span<const double> t0_per_level,
                              const perf::MachineConfig& machine) {
  machine.validate();
  if (n_per_level.size() != t0_per_level.size() || n_per_level.empty())
    throw std::invalid_argument("initial_guess_s0: length mismatch");
  double denom = 0.0;
  for (std::size_t i = 0; i < n_per_level.size(); ++i) {
    if (n_per_level[i] < 1 || !(t0_per_level[i] > 0.0))
      throw std::invalid_argument("initial_guess_s0: inputs must be positive");
    denom += static_cast<double>(n_per_level[i]) *
             static_cast<double>(machine.processors_per_sample(static_cast<int>(i), 0)) *
             t0_per_level[i];
  }
  InitialGuess g;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    auto n = static_cast<std::int64_t>(std::floor(static_cast<double>(machine.p_max) *
                                                  static_cast<double>(n_per_level[l]) *
                                                  t0_per_level[l] / denom));
    n = std::min(n, gene_bound(machine, static_cast<int>(l), 0));
    if (n < 1) {
      n = 1;
      g.repaired = true;
    }
    const std::int64_t k = (n_per_level[l] + n - 1) / n;
    g.n_par.push_back(n);
    g.k_seq.push_back(k);
    g.makespan = std::max(g.makespan, static_cast<double>(k) * t0_per_level[l]);
  }
  return g;
}

Genes genes_from_guess(const InitialGuess& guess, const HeteroProblem& problem) {
  Genes g = zero_genes(problem);
  for (std::size_t l = 0; l < g.size() && l < guess.n_par.size(); ++l) g[l][0] = guess.n_par[l];
  return g;
}

LevelSolve level_kseq_solve(std::span<const std::int64_t> n_row, std::span<const double> t_row,
                            std::int64_t target) {
  if (n_row.size() != t_row.size()) throw std::invalid_argument("level_kseq_solve: length mismatch");
  LevelSolve out;
  out.k.assign(n_row.size(), 0);
  if (target <= 0) return out;
  bool any = false;
  for (std::size_t t = 0; t < n_row.size(); ++t) {
    if (n_row[t] < 0) throw std::invalid_argument("negative gene");
    if (n_row[t] > 0) {
      any = true;
      if (!(t_row[t] > 0.0)) throw std::invalid_argument("run-times must be positive");
    }
  }
  if (!any) throw InfeasibleConfiguration("level has no concurrent samples");

  auto capacity = [&](double T) {
    std::int64_t c = 0;
    for (std::size_t t = 0; t < n_row.size(); ++t)
      if (n_row[t] > 0) c += n_row[t] * steps_within(T, t_row[t]);
    return c;
  };

  // The optimum is a multiple of some t_theta; capacity is monotone in T.
  double best_T = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n_row.size(); ++t) {
    if (n_row[t] == 0) continue;
    std::int64_t lo = 1, hi = (target + n_row[t] - 1) / n_row[t];
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (capacity(static_cast<double>(mid) * t_row[t]) >= target)
        hi = mid;
      else
        lo = mid + 1;
    }
    best_T = std::min(best_T, static_cast<double>(lo) * t_row[t]);
  }

  std::int64_t total = 0;
  for (std::size_t t = 0; t < n_row.size(); ++t) {
    if (n_row[t] == 0) continue;
    out.k[t] = steps_within(best_T, t_row[t]);
    total += n_row[t] * out.k[t];
  }
  // Drop surplus steps; the makespan cannot shrink (T is minimal).
  for (std::size_t t = 0; t < n_row.size(); ++t) {
    if (n_row[t] == 0) continue;
    const std::int64_t drop = std::min(out.k[t], (total - target) / n_row[t]);
    out.k[t] -= drop;
    total -= drop * n_row[t];
  }
  for (std::size_t t = 0; t < n_row.size(); ++t)
    if (out.k[t] > 0) out.makespan = std::max(out.makespan, static_cast<double>(out.k[t]) * t_row[t]);
  return out;
}

Genes repair(Genes genes, const HeteroProblem& problem) {
  const int L = problem.levels();
  const int S = problem.s();
  const auto& m = problem.machine;

  std::int64_t min_footprint = 0;
  for (int l = 0; l < L; ++l)
    if (problem.is_required(l)) {
      if (!m.fits(l, 0)) throw InfeasibleConfiguration("required level does not fit on machine");
      min_footprint += m.processors_per_sample(l, 0);
    }
  if (min_footprint > m.p_max)
    throw InfeasibleConfiguration("p_max below the minimal footprint of the required levels");

  genes.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    auto& row = genes[static_cast<std::size_t>(l)];
    row.resize(static_cast<std::size_t>(S) + 1, 0);
    for (int t = 0; t <= S; ++t)
      row[static_cast<std::size_t>(t)] =
          std::clamp<std::int64_t>(row[static_cast<std::size_t>(t)], 0, gene_bound(m, l, t));
    if (problem.is_required(l) && row_sum(row) == 0) row[0] = 1;
  }

  std::int64_t used = processors_used(genes, m);
  while (used > m.p_max) {
    bool progress = false;
    for (int t = S; t >= 0 && used > m.p_max; --t) {
      for (int l = 0; l < L && used > m.p_max; ++l) {
        auto& row = genes[static_cast<std::size_t>(l)];
        auto& g = row[static_cast<std::size_t>(t)];
        if (g == 0) continue;
        if (g == 1 && problem.is_required(l) && row_nonzero(row) == 1) continue;
        const std::int64_t half = g / 2;
        used -= (g - half) * m.processors_per_sample(l, t);
        g = half;
        progress = true;
      }
    }
    if (!progress) {
      // Only lone single samples remain; move each to the cheapest scale.
      for (int l = 0; l < L; ++l) {
        auto& row = genes[static_cast<std::size_t>(l)];
        std::fill(row.begin(), row.end(), 0);
        if (problem.is_required(l)) row[0] = 1;
      }
      used = processors_used(genes, m);
      if (used > m.p_max) throw InfeasibleConfiguration("repair could not satisfy the processor budget");
    }
  }
  return genes;
}

bool Objective::better_than(const Objective& o) const {
  if (feasible != o.feasible) return feasible;
  if (!same_time(makespan, o.makespan)) return makespan < o.makespan;
  return idle > o.idle;
}

bool Objective::equivalent(const Objective& o) const {
  return feasible == o.feasible && same_time(makespan, o.makespan) && idle == o.idle;
}

Objective Objective::worst() {
  Objective o;
  o.makespan = std::numeric_limits<double>::infinity();
  o.idle = std::numeric_limits<std::int64_t>::min();
  o.feasible = false;
  return o;
}

Objective objective(const Genes& genes, const HeteroProblem& problem, ScheduleMatrix* schedule) {
  if (!satisfies_constraints(genes, problem)) return Objective::worst();
  Objective obj;
  ScheduleMatrix sm;
  sm.n_par = genes;
  const int S = problem.s();
  for (int l = 0; l < problem.levels(); ++l) {
    const auto& row = genes[static_cast<std::size_t>(l)];
    const auto target = problem.n_per_level[static_cast<std::size_t>(l)];
    std::vector<double> t_row(static_cast<std::size_t>(S) + 1);
    for (int t = 0; t <= S; ++t) t_row[static_cast<std::size_t>(t)] = problem.model.time(l, t);
    if (row_sum(row) == 0) {
      if (target > 0) return Objective::worst();
      sm.k_seq.emplace_back(row.size(), 0);
      continue;
    }
    auto solve = level_kseq_solve(row, t_row, target);
    obj.makespan = std::max(obj.makespan, solve.makespan);
    sm.k_seq.push_back(std::move(solve.k));
  }
  obj.idle = problem.machine.p_max - processors_used(genes, problem.machine);
  if (schedule) *schedule = std::move(sm);
  return obj;
}

Mutation parse_mutation(const std::string& name) {
  if (name == "random-reset" || name == "random_reset") return Mutation::random_reset;
  if (name == "non-uniform" || name == "non_uniform") return Mutation::non_uniform;
  if (name == "gaussian") return Mutation::gaussian;
  if (name == "hybrid-a" || name == "hybrid_a") return Mutation::hybrid_a;
  if (name == "hybrid-b" || name == "hybrid_b") return Mutation::hybrid_b;
  throw std::invalid_argument("unknown mutation operator '" + name + "'");
}

std::string to_string(Mutation m) {
  switch (m) {
    case Mutation::random_reset: return "random-reset";
    case Mutation::non_uniform: return "non-uniform";
    case Mutation::gaussian: return "gaussian";
    case Mutation::hybrid_a: return "hybrid-a";
    case Mutation::hybrid_b: return "hybrid-b";
  }
  return "?";
}

void SaConfig::validate() const {
  if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling must lie in (0,1)");
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0) || !(hybrid_rate >= 0.0 && hybrid_rate <= 1.0))
    throw std::invalid_argument("mutation rates must lie in [0,1]");
}

void transfer_move(Genes& genes, int l1, int t1, int l2, int t2, std::int64_t k) {
  auto& a = genes.at(static_cast<std::size_t>(l1)).at(static_cast<std::size_t>(t1));
  auto& b = genes.at(static_cast<std::size_t>(l2)).at(static_cast<std::size_t>(t2));
  if (k < 0 || k > a) throw std::invalid_argument("transfer amount out of range");
  a -= k;
  // k 2^{t1-t2} 2^{3(l1-l2)}, floored.
  const int shift = (t1 - t2) + 3 * (l1 - l2);
  if (shift >= 0)
    b += k << shift;
  else
    b += k >> (-shift);
}

namespace {

void gaussian_step(Genes& g, double rate, double scale, const HeteroProblem& p, RandomStream& rs) {
  for (int l = 0; l < p.levels(); ++l) {
    const double sd = scale * static_cast<double>(p.machine.p_max) /
                      static_cast<double>(p.machine.processors_per_sample(l, 0));
    for (auto& gene : g[static_cast<std::size_t>(l)])
      if (rs.uniform() < rate) gene += std::llround(rs.normal() * sd);
  }
}

}  // namespace

Genes mutate(const Genes& genes, Mutation op, int step, const SaConfig& cfg,
             const HeteroProblem& p, RandomStream& rs) {
  Genes g = genes;
  const int L = p.levels();
  const int S = p.s();
  switch (op) {
    case Mutation::random_reset:
      for (int l = 0; l < L; ++l)
        for (int t = 0; t <= S; ++t)
          if (rs.uniform() < cfg.mutation_rate)
            g[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] =
                rs.uniform_int(0, gene_bound(p.machine, l, t));
      break;
    case Mutation::non_uniform: {
      const double frac = cfg.budget > 0 ? 1.0 - static_cast<double>(step) / cfg.budget : 0.0;
      for (int l = 0; l < L; ++l)
        for (int t = 0; t <= S; ++t)
          if (rs.uniform() < cfg.mutation_rate) {
            const auto bound = gene_bound(p.machine, l, t);
            const auto strength = std::max<std::int64_t>(
                1, std::llround(static_cast<double>(bound) * std::max(0.0, frac)));
            g[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] +=
                rs.uniform_int(-strength, strength);
          }
      break;
    }
    case Mutation::gaussian:
      gaussian_step(g, cfg.mutation_rate, cfg.gaussian_scale, p, rs);
      break;
    case Mutation::hybrid_a:
    case Mutation::hybrid_b: {
      gaussian_step(g, cfg.hybrid_rate, cfg.gaussian_scale, p, rs);
      g = repair(std::move(g), p);
      const int cols = S + 1;
      const int genes_total = L * cols;
      int l1, t1, l2, t2;
      if (op == Mutation::hybrid_a) {
        if (genes_total < 2) break;
        const auto a = rs.uniform_int(0, genes_total - 1);
        auto b = rs.uniform_int(0, genes_total - 2);
        if (b >= a) ++b;
        l1 = static_cast<int>(a / cols);
        t1 = static_cast<int>(a % cols);
        l2 = static_cast<int>(b / cols);
        t2 = static_cast<int>(b % cols);
      } else {
        if (cols < 2) break;
        l1 = l2 = static_cast<int>(rs.uniform_int(0, L - 1));
        t1 = static_cast<int>(rs.uniform_int(0, cols - 1));
        t2 = static_cast<int>(rs.uniform_int(0, cols - 2));
        if (t2 >= t1) ++t2;
      }
      const auto n1 = g[static_cast<std::size_t>(l1)][static_cast<std::size_t>(t1)];
      if (n1 >= 1) transfer_move(g, l1, t1, l2, t2, rs.uniform_int(0, n1 - 1));
      break;
    }
  }
  return repair(std::move(g), p);
}

SaResult sa_optimize(const Genes& start, const SaConfig& cfg, const HeteroProblem& problem,
                     RandomStream stream) {
  cfg.validate();
  problem.validate();
  auto better = [&](const Objective& a, const Objective& b) {
    if (cfg.aux_objective) return a.better_than(b);
    if (a.feasible != b.feasible) return a.feasible;
    return !same_time(a.makespan, b.makespan) && a.makespan < b.makespan;
  };

  SaResult res;
  Genes cur = repair(start, problem);
  Objective cur_obj = objective(cur, problem);
  res.best = cur;
  res.best_objective = cur_obj;
  double temp = cfg.t0;

  for (int it = 1; it <= cfg.budget; ++it) {
    RandomStream rs = stream.split(static_cast<std::uint64_t>(it));
    Genes cand = mutate(cur, cfg.mutation, it, cfg, problem, rs);
    const Objective obj = objective(cand, problem);
    ++res.evaluations;

    bool accept;
    if (better(obj, cur_obj)) {
      accept = true;
    } else if (same_time(obj.makespan, cur_obj.makespan)) {
      // Equal run-time: a neutral move unless it gives up idle processors.
      accept = !cfg.aux_objective || obj.idle >= cur_obj.idle;
    } else {
      const double delta = obj.makespan - cur_obj.makespan;
      accept = std::isfinite(delta) && rs.uniform() < std::exp(-delta / temp);
    }
    if (accept) {
      cur = std::move(cand);
      cur_obj = obj;
    }
    if (better(cur_obj, res.best_objective)) {
      res.best = cur;
      res.best_objective = cur_obj;
    }
    res.trace.push_back({it, res.best_objective.makespan, res.best_objective.idle,
                         cur_obj.makespan, temp});
    temp *= cfg.cooling;
  }
  objective(res.best, problem, &res.schedule);
  return res;
}

}  // namespace mlmc::sched
