#pragma once

// JSON and CSV input/output for results, schedules and reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlmc/adaptive.hpp"
#include "mlmc/machine_sim.hpp"
#include "mlmc/perf_model.hpp"
#include "mlmc/sched_hetero.hpp"
#include "mlmc/sched_homog.hpp"

namespace mlmc::io {

// Rows of comma-separated numbers; blank lines and '#' comments skipped.
std::vector<std::vector<double>> read_matrix_csv(std::istream& is);
std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path);
// One value per line.
std::vector<double> read_histogram_csv(std::istream& is);
std::vector<double> read_histogram_csv(const std::filesystem::path& path);

std::string to_json(const MlmcResult& r, int indent = 2);
std::string to_json(const sched::ScheduleMatrix& m, const sched::Objective& obj, int indent = 2);
std::string to_json(const sched::SaResult& r, int indent = 2);
std::string to_json(const sched::StaticSchedule& s, int indent = 2);
// Timeline intervals are omitted unless `with_timeline`.
std::string to_json(const sim::SimReport& r, bool with_timeline = false, int indent = 2);

void write_sa_trace_csv(std::ostream& os, const std::vector<sched::SaTracePoint>& trace);

// Scheduling problem as read by `mlmc-sched schedule`:
//   {"machine": {"p_max", "p0_min", "s_window"},
//    "t_matrix": [[...], ...]  or  "t0": [...], "serial_fraction": b,
//    "n": [...], "required": [...]?,
//    "sa": {"budget", "mutation", "t0", "cooling", "mutation_rate",
//           "hybrid_rate", "gaussian_scale", "aux_objective"}?,
//    "seed": 1?, "start": "guess" | "zero"?}
struct ProblemSpec {
  sched::HeteroProblem problem;
  sched::SaConfig sa;
  std::uint64_t seed = 1;
};
ProblemSpec parse_problem(std::istream& is);

// Schedule as read by `mlmc-sched simulate`. Either heterogeneous
//   {"kind": "hetero", <problem fields>, "n_par": [[...]]}
// or homogeneous
//   {"kind": "homog", <problem fields>, "theta": [...]}
// plus optional "mode" ("sample-sync" | "level-sync" | "dynamic"),
// "factors" ({"kind": "half-normal", "var"} | {"kind": "empirical",
// "runtimes": [...]}) and "seed".
struct SimulationSpec {
  sched::HeteroProblem problem;
  std::optional<sched::ScheduleMatrix> hetero;
  std::optional<sched::StaticSchedule> homog;
  sim::ExecutionMode mode;
  std::uint64_t seed = 1;
};
SimulationSpec parse_simulation(std::istream& is);

sim::ExecutionKind parse_execution_kind(const std::string& name);
std::string to_string(sim::ExecutionKind k);

}  // namespace mlmc::io
