#pragma once

// Heterogeneous bulk-synchronous scheduling. A candidate is the integer
// matrix N_{l,theta} of concurrently running samples per level and scale;
// the sequential step counts follow from it level by level, and the
// matrix itself is searched by simulated annealing.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlmc/perf_model.hpp"
#include "mlmc/random.hpp"

namespace mlmc::sched {

using Genes = std::vector<std::vector<std::int64_t>>;

struct HeteroProblem {
  perf::MachineConfig machine;
  perf::RunTimeModel model;
  std::vector<std::int64_t> n_per_level;
  // Levels that must keep at least one concurrent sample. Empty = all.
  std::vector<bool> required;

  int levels() const { return static_cast<int>(n_per_level.size()); }
  // Scale exponents actually searched: min(S, model columns - 1).
  int s() const;
  bool is_required(int level) const;
  void validate() const;
};

struct ScheduleMatrix {
  Genes n_par;
  Genes k_seq;
};

// floor(p_max / (2^{3l+theta} p0_min)), the per-gene upper bound.
std::int64_t gene_bound(const perf::MachineConfig& machine, int level, int theta);
std::int64_t processors_used(const Genes& genes, const perf::MachineConfig& machine);
// Gene bounds, non-empty required rows and total processor budget.
bool satisfies_constraints(const Genes& genes, const HeteroProblem& problem);

Genes zero_genes(const HeteroProblem& problem);

struct InitialGuess {
  std::vector<std::int64_t> n_par;  // N_{l,0}
  std::vector<std::int64_t> k_seq;
  double makespan = 0.0;
  bool repaired = false;  // some N_{l,0} floored to 0 and was set to 1
};

// N_{l,0} = floor(p_max N_l t_{l,0} / sum_i N_i 2^{3i} p0_min t_{i,0}).
InitialGuess initial_guess_s0(std::span<const std::int64_t> n_per_level,
                              std::span<const double> t0_per_level,
                              const perf::MachineConfig& machine);

// Places an S = 0 guess into column 0 of a full gene matrix.
Genes genes_from_guess(const InitialGuess& guess, const HeteroProblem& problem);

struct LevelSolve {
  std::vector<std::int64_t> k;
  double makespan = 0.0;
};

// Minimal level makespan max_theta t_theta k_theta subject to
// sum_theta N_theta k_theta >= target, followed by a greedy reduction of
// the k that keeps the makespan.
LevelSolve level_kseq_solve(std::span<const std::int64_t> n_row, std::span<const double> t_row,
                            std::int64_t target);

// Clamp to bounds, fill empty required rows with N_{l,0} = 1, then halve
// genes (theta = S..0, cycling over levels) until the processor budget
// holds.
Genes repair(Genes genes, const HeteroProblem& problem);

struct Objective {
  double makespan = 0.0;
  std::int64_t idle = 0;
  bool feasible = true;

  // Lexicographic: shorter makespan, then more idle processors.
  bool better_than(const Objective& other) const;
  bool equivalent(const Objective& other) const;
  static Objective worst();
};

Objective objective(const Genes& genes, const HeteroProblem& problem, ScheduleMatrix* schedule = nullptr);

enum class Mutation { random_reset, non_uniform, gaussian, hybrid_a, hybrid_b };

Mutation parse_mutation(const std::string& name);
std::string to_string(Mutation m);

struct SaConfig {
  double t0 = 1e3;
  double cooling = 0.8;
  int budget = 2000;
  Mutation mutation = Mutation::gaussian;
  // Per-gene rate of the plain operators.
  double mutation_rate = 0.2;
  // Rate of the Gaussian pre-step of the hybrid operators.
  double hybrid_rate = 0.1;
  // Std of the Gaussian step is gaussian_scale p_max / (2^{3l} p0_min).
  double gaussian_scale = 0.1;
  // Break makespan ties by idle processors.
  bool aux_objective = true;

  void validate() const;
};

// Moves k of gene (l1,t1) to (l2,t2), scaled by the processor ratio and
// floored, so the footprint never grows.
void transfer_move(Genes& genes, int l1, int t1, int l2, int t2, std::int64_t k);

// One mutation step followed by repair.
Genes mutate(const Genes& genes, Mutation op, int step, const SaConfig& config,
             const HeteroProblem& problem, RandomStream& stream);

struct SaTracePoint {
  int iteration = 0;
  double best_makespan = 0.0;
  std::int64_t best_idle = 0;
  double current_makespan = 0.0;
  double temperature = 0.0;
};

struct SaResult {
  Genes best;
  Objective best_objective;
  ScheduleMatrix schedule;
  std::vector<SaTracePoint> trace;
  int evaluations = 0;
};

SaResult sa_optimize(const Genes& start, const SaConfig& config, const HeteroProblem& problem,
                     RandomStream stream);

}  // namespace mlmc::sched
