#pragma once

// Experiment scenarios driven by a configuration file. Each scenario
// writes CSV/JSON (and SVG timelines where useful) into an output
// directory, prints a summary and, with `check`, evaluates its
// acceptance thresholds.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlmc/adaptive.hpp"
#include "mlmc/config.hpp"
#include "mlmc/machine_sim.hpp"
#include "mlmc/perf_model.hpp"
#include "mlmc/sched_hetero.hpp"
#include "mlmc/sched_homog.hpp"

namespace mlmc::scenarios {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitUsage = 64;

struct Options {
  Config config;
  std::filesystem::path out_dir = "results";
  std::optional<int> seeds;
  std::optional<int> budget;
  std::optional<double> eps;
  unsigned jobs = 1;
  bool check = false;
  std::uint64_t seed = 1;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Outcome {
  int exit_code = kExitOk;
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& names();
bool is_scenario(const std::string& name);

// Runs one scenario; the summary goes to `log`. Throws std::invalid_argument
// for an unknown name.
Outcome run(const std::string& name, const Options& options, std::ostream& log);

// ---------------------------------------------------------------------------
// Building blocks shared by the scenarios and the tests.

// Reference inputs of the four-level example: the measured timing matrix,
// N = (4123, 688, 108, 16), p_max = 8192, p0_min = 1, S = 4.
perf::RunTimeModel reference_model();
std::vector<std::int64_t> reference_counts();
perf::MachineConfig reference_machine();
// Measured strong efficiencies of the solver for theta = 0..4.
std::vector<double> reference_efficiencies();
// t_{l,0} measured for the MLMC run: (166, 168, 174, 177).
std::vector<double> reference_t0();
// 2048 level-0 run-times: 2045 spread evenly over [44, 46] s and three
// slow samples at 50 s.
std::vector<double> reference_histogram();

// Expected entries of the fixed-theta level table (theta = 0..4): level
// times and eta for levels 0..3, then the whole-run time and eta.
struct ReferenceRow {
  int theta;
  double time[4];
  double eta[4];
  double total_time;
  double total_eta;
};
const std::vector<ReferenceRow>& reference_level_table();

struct LevelTableRow {
  int theta = 0;
  std::vector<double> time;  // k_seq t_{l,theta} per level
  std::vector<double> eta;   // (1 - Imb) Eff per level
  double total_time = 0.0;
  double total_eta = 0.0;    // t_opt / total_time
};

// Level times and efficiencies for every fixed theta. `eff` gives
// Eff(theta) for all levels; empty means Eff from the model.
std::vector<LevelTableRow> level_table(const perf::MachineConfig& machine,
                                       const perf::RunTimeModel& model,
                                       const std::vector<std::int64_t>& n,
                                       const std::vector<double>& eff, double t_opt);

// N scaled so that sum_l N_l 2^{3l} p0_min / p_max is close to `kseq`.
std::vector<std::int64_t> scaled_counts(const std::vector<std::int64_t>& base, double kseq,
                                        const perf::MachineConfig& machine);
double global_kseq(const std::vector<std::int64_t>& n, const perf::MachineConfig& machine);

// SA start: the S = 0 estimate placed in column 0, repaired.
sched::Genes default_start(const sched::HeteroProblem& problem);

struct SaStats {
  double min = 0.0, avg = 0.0, max = 0.0;
  std::vector<double> per_seed;
  std::vector<sched::SaResult> results;
};

// `seeds` independent SA chains; chain i uses root.split(i). The chains
// start from `start` (repaired) or, when empty, from default_start.
SaStats sa_study(const sched::HeteroProblem& problem, const sched::SaConfig& config, int seeds,
                 const RandomStream& root, unsigned jobs = 1, const sched::Genes& start = {});

// Genes of an S = 0 solution placed in column 0 of `problem`'s matrix.
sched::Genes embed_single_scale(const sched::Genes& flat, const sched::HeteroProblem& problem);

struct RobustDemo {
  double p_sample_sync_100 = 0.0;   // P(SaSyHom makespan = 100 s)
  double p_level_sync_100 = 0.0;    // P(LeSyHom makespan >= 100 s)
  double optimum = 0.0;
  std::vector<double> sample_sync;  // makespans
  std::vector<double> level_sync;
};

// Single-level, theta = 0 replication study of the heavy-tailed
// histogram (sampling without replacement).
RobustDemo robust_demo(const std::vector<double>& histogram, const perf::MachineConfig& machine,
                       std::int64_t n, int replications, const RandomStream& root);

// Batch scheduler for the adaptive loop: level-synchronous homogeneous
// blocks on `machine` with the Amdahl surrogate (serial fraction `b`)
// built from the current cost estimates.
BatchScheduler lesyhom_batches(const perf::MachineConfig& machine, double b);

}  // namespace mlmc::scenarios
