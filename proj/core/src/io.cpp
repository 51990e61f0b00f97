#include "mlmc/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mlmc/errors.hpp"

namespace mlmc::io {
namespace {

using nlohmann::json;

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(cell.substr(b), &used);
    if (cell.find_first_not_of(" \t\r", b + used) != std::string::npos)
      throw std::runtime_error("bad number '" + cell + "'");
    row.push_back(v);
  }
  return row;
}

bool skip_line(const std::string& line) {
  const auto b = line.find_first_not_of(" \t\r");
  return b == std::string::npos || line[b] == '#';
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return is;
}

json level_stats(const std::vector<LevelStats>& levels) {
  json a = json::array();
  for (const auto& s : levels) a.push_back({{"n", s.n}, {"mean", s.mean}, {"s2", s.s2}, {"cost", s.cost}});
  return a;
}

json objective_json(const sched::Objective& o) {
  return {{"makespan", o.makespan}, {"idle", o.idle}, {"feasible", o.feasible}};
}

perf::RuntimeFactorDistribution parse_factors(const json& j) {
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant") return perf::RuntimeFactorDistribution::constant();
  if (kind == "half-normal") return perf::RuntimeFactorDistribution::half_normal(j.at("var").get<double>());
  if (kind == "empirical")
    return perf::RuntimeFactorDistribution::empirical(j.at("runtimes").get<std::vector<double>>());
  throw std::invalid_argument("unknown factor kind '" + kind + "'");
}

sched::HeteroProblem parse_problem_fields(const json& j) {
  sched::HeteroProblem p;
  if (j.contains("machine")) {
    const auto& m = j.at("machine");
    p.machine.p_max = m.value("p_max", p.machine.p_max);
    p.machine.p0_min = m.value("p0_min", p.machine.p0_min);
    p.machine.s_window = m.value("s_window", p.machine.s_window);
  }
  const auto factors = j.contains("factors") ? parse_factors(j.at("factors"))
                                             : perf::RuntimeFactorDistribution::constant();
  if (j.contains("t_matrix")) {
    p.model = perf::RunTimeModel(j.at("t_matrix").get<std::vector<std::vector<double>>>(), factors);
  } else if (j.contains("t0")) {
    const auto t0 = j.at("t0").get<std::vector<double>>();
    p.model = perf::RunTimeModel::from_surrogate(t0, j.value("serial_fraction", 0.0),
                                                 p.machine.s_window, factors);
  } else {
    throw std::invalid_argument("problem needs 't_matrix' or 't0'");
  }
  p.n_per_level = j.at("n").get<std::vector<std::int64_t>>();
  if (j.contains("required")) p.required = j.at("required").get<std::vector<bool>>();
  p.machine.validate();
  p.validate();
  return p;
}

template <class Fn>
auto parse_json(std::istream& is, Fn&& fn) {
  json j;
  try {
    j = json::parse(is);
    return fn(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON input: ") + e.what());
  }
}

}  // namespace

std::vector<std::vector<double>> read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    try {
      rows.push_back(parse_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_matrix_csv(is);
}

std::vector<double> read_histogram_csv(std::istream& is) {
  std::vector<double> out;
  for (auto& row : read_matrix_csv(is)) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<double> read_histogram_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_histogram_csv(is);
}

std::string to_json(const MlmcResult& r, int indent) {
  json j;
  j["estimate"] = r.estimate;
  j["final_L"] = r.final_L;
  j["final_n"] = r.final_n;
  j["bias"] = r.bias;
  j["sampling_variance"] = r.sampling_variance;
  j["simulated_time"] = r.simulated_time;
  j["truncated"] = r.truncated;
  j["converged"] = r.converged;
  j["levels"] = level_stats(r.levels);
  json h = json::array();
  for (const auto& it : r.history)
    h.push_back({{"L", it.L},
                 {"n_target", it.n_target},
                 {"n_taken", it.n_taken},
                 {"estimate", it.estimate},
                 {"bias", it.bias},
                 {"sampling_variance", it.sampling_variance},
                 {"batch_time", it.batch_time}});
  j["history"] = h;
  return j.dump(indent);
}

std::string to_json(const sched::ScheduleMatrix& m, const sched::Objective& obj, int indent) {
  json j;
  j["n_par"] = m.n_par;
  j["k_seq"] = m.k_seq;
  j["objective"] = objective_json(obj);
  return j.dump(indent);
}

std::string to_json(const sched::SaResult& r, int indent) {
  json j;
  j["n_par"] = r.schedule.n_par;
  j["k_seq"] = r.schedule.k_seq;
  j["objective"] = objective_json(r.best_objective);
  j["evaluations"] = r.evaluations;
  return j.dump(indent);
}

std::string to_json(const sched::StaticSchedule& s, int indent) {
  json j;
  j["p_max"] = s.p_max;
  j["predicted_time"] = s.predicted_time();
  json lv = json::array();
  for (const auto& l : s.levels)
    lv.push_back({{"level", l.level},
                  {"theta", l.theta},
                  {"n_required", l.n_required},
                  {"blocks", l.blocks},
                  {"processors_per_block", l.processors_per_block},
                  {"k_seq", l.k_seq},
                  {"t_sample", l.t_sample},
                  {"oversampling", l.oversampling()},
                  {"predicted_time", l.predicted_time()}});
  j["levels"] = lv;
  return j.dump(indent);
}

std::string to_json(const sim::SimReport& r, bool with_timeline, int indent) {
  json j;
  j["p_max"] = r.p_max;
  j["makespan"] = r.makespan;
  j["busy_processor_seconds"] = r.busy_processor_seconds;
  j["idle_fraction"] = r.idle_fraction;
  j["required"] = r.required;
  j["computed"] = r.computed;
  j["oversampled"] = r.oversampled;
  j["level_time"] = r.level_time;
  if (with_timeline) {
    json t = json::array();
    for (const auto& iv : r.timeline)
      t.push_back({{"block", iv.block},
                   {"processor_offset", iv.processor_offset},
                   {"processors", iv.processors},
                   {"level", iv.level},
                   {"theta", iv.theta},
                   {"sample", iv.sample},
                   {"start", iv.start},
                   {"end", iv.end}});
    j["timeline"] = t;
  }
  return j.dump(indent);
}

void write_sa_trace_csv(std::ostream& os, const std::vector<sched::SaTracePoint>& trace) {
  os << "iteration,best_makespan,best_idle,current_makespan,temperature\n";
  for (const auto& p : trace)
    os << p.iteration << ',' << p.best_makespan << ',' << p.best_idle << ',' << p.current_makespan
       << ',' << p.temperature << '\n';
}

ProblemSpec parse_problem(std::istream& is) {
  return parse_json(is, [](const json& j) {
    ProblemSpec spec;
    spec.problem = parse_problem_fields(j);
    spec.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("sa")) {
      const auto& s = j.at("sa");
      spec.sa.budget = s.value("budget", spec.sa.budget);
      spec.sa.t0 = s.value("t0", spec.sa.t0);
      spec.sa.cooling = s.value("cooling", spec.sa.cooling);
      spec.sa.mutation_rate = s.value("mutation_rate", spec.sa.mutation_rate);
      spec.sa.hybrid_rate = s.value("hybrid_rate", spec.sa.hybrid_rate);
      spec.sa.gaussian_scale = s.value("gaussian_scale", spec.sa.gaussian_scale);
      spec.sa.aux_objective = s.value("aux_objective", spec.sa.aux_objective);
      if (s.contains("mutation")) spec.sa.mutation = sched::parse_mutation(s.at("mutation").get<std::string>());
    }
    spec.sa.validate();
    return spec;
  });
}

sim::ExecutionKind parse_execution_kind(const std::string& name) {
  if (name == "sample-sync") return sim::ExecutionKind::static_sample_sync;
  if (name == "level-sync") return sim::ExecutionKind::static_level_sync;
  if (name == "dynamic") return sim::ExecutionKind::dynamic;
  throw std::invalid_argument("unknown execution mode '" + name + "'");
}

std::string to_string(sim::ExecutionKind k) {
  switch (k) {
    case sim::ExecutionKind::static_sample_sync: return "sample-sync";
    case sim::ExecutionKind::static_level_sync: return "level-sync";
    case sim::ExecutionKind::dynamic: return "dynamic";
  }
  return "?";
}

SimulationSpec parse_simulation(std::istream& is) {
  return parse_json(is, [](const json& j) {
    SimulationSpec spec;
    spec.problem = parse_problem_fields(j);
    spec.seed = j.value("seed", std::uint64_t{1});
    spec.mode.kind = parse_execution_kind(j.value("mode", std::string("level-sync")));
    if (j.value("sampling", std::string("independent")) == "without-replacement")
      spec.mode.sampling = perf::FactorSampling::without_replacement;
    const std::string kind = j.value("kind", std::string("hetero"));
    if (kind == "hetero") {
      const auto genes = j.at("n_par").get<sched::Genes>();
      sched::ScheduleMatrix m;
      const auto obj = sched::objective(genes, spec.problem, &m);
      if (!obj.feasible) throw InfeasibleConfiguration("schedule violates the processor constraints");
      spec.hetero = m;
    } else if (kind == "homog") {
      sched::ThetaChoice choice;
      choice.theta = j.at("theta").get<std::vector<int>>();
      spec.homog = sched::build_static_schedule(choice, spec.problem.n_per_level,
                                                spec.problem.machine, spec.problem.model);
    } else {
      throw std::invalid_argument("schedule kind must be 'hetero' or 'homog'");
    }
    return spec;
  });
}

}  // namespace mlmc::io
