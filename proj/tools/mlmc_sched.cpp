// mlmc-sched: scenario runner, heterogeneous scheduler and schedule simulator.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "mlmc/config.hpp"
#include "mlmc/errors.hpp"
#include "mlmc/io.hpp"
#include "mlmc/machine_sim.hpp"
#include "mlmc/scenarios.hpp"

namespace {

namespace sc = mlmc::scenarios;

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

// MLMC_SCHED_SEED wins over the config's [run] seed.
std::uint64_t root_seed(const mlmc::Config& cfg, std::uint64_t fallback) {
  if (const char* env = std::getenv("MLMC_SCHED_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("MLMC_SCHED_SEED is not an integer: ") + env);
    }
  }
  return static_cast<std::uint64_t>(cfg.get_int("run.seed", static_cast<std::int64_t>(fallback)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling and simulation of parallel multilevel Monte Carlo runs"};
  app.require_subcommand(1);

  std::string scenario, config_path, out_dir = "results";
  int seeds = 0, budget = 0;
  unsigned jobs = 1;
  double eps = 0.0;
  bool check = false;
  auto* run = app.add_subcommand("run", "Run an experiment scenario");
  run->add_option("scenario", scenario, "Scenario name")->required();
  run->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  auto* seeds_opt = run->add_option("--seeds", seeds, "Seeds / replications")->check(CLI::PositiveNumber);
  auto* budget_opt = run->add_option("--budget", budget, "SA evaluation budget")->check(CLI::PositiveNumber);
  auto* eps_opt = run->add_option("--eps", eps, "MLMC tolerance")->check(CLI::PositiveNumber);
  run->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  run->add_flag("--check", check, "Evaluate acceptance thresholds");

  std::string problem_path;
  auto* schedule = app.add_subcommand("schedule", "Optimize a heterogeneous schedule");
  schedule->add_option("problem", problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);

  std::string schedule_path;
  bool with_timeline = false;
  auto* simulate = app.add_subcommand("simulate", "Simulate a schedule");
  simulate->add_option("schedule", schedule_path, "Schedule JSON")->required()->check(CLI::ExistingFile);
  simulate->add_flag("--timeline", with_timeline, "Include the per-sample intervals");

  app.add_subcommand("list", "List scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::kExitUsage;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& n : sc::names()) std::cout << n << "\n";
      return 0;
    }
    if (*run) {
      if (!sc::is_scenario(scenario)) {
        std::cerr << "unknown scenario '" << scenario << "'; known:";
        for (const auto& n : sc::names()) std::cerr << " " << n;
        std::cerr << "\n";
        return sc::kExitUsage;
      }
      sc::Options opt;
      if (!config_path.empty()) opt.config = mlmc::Config::load(config_path);
      opt.out_dir = out_dir;
      if (*seeds_opt) opt.seeds = seeds;
      if (*budget_opt) opt.budget = budget;
      if (*eps_opt) opt.eps = eps;
      opt.jobs = jobs;
      opt.check = check;
      opt.seed = root_seed(opt.config, opt.seed);
      return sc::run(scenario, opt, std::cout).exit_code;
    }
    if (*schedule) {
      auto f = open_or_throw(problem_path);
      const auto spec = mlmc::io::parse_problem(f);
      const auto start = sc::default_start(spec.problem);
      mlmc::Config none;
      const auto result =
          mlmc::sched::sa_optimize(start, spec.sa, spec.problem, mlmc::RandomStream(root_seed(none, spec.seed)));
      std::cout << mlmc::io::to_json(result.schedule, result.best_objective) << "\n";
      return 0;
    }
    if (*simulate) {
      auto f = open_or_throw(schedule_path);
      const auto spec = mlmc::io::parse_simulation(f);
      mlmc::Config none;
      const mlmc::RandomStream stream(root_seed(none, spec.seed));
      auto mode = spec.mode;
      mode.record_timeline = with_timeline;
      const auto report = spec.hetero ? mlmc::sim::simulate(*spec.hetero, spec.problem, mode, stream)
                                      : mlmc::sim::simulate(*spec.homog, spec.problem.model, mode, stream);
      std::cout << mlmc::io::to_json(report, with_timeline) << "\n";
      return 0;
    }
  } catch (const mlmc::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return sc::kExitUsage;
  } catch (const mlmc::InfeasibleConfiguration& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
