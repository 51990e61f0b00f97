#include "mlmc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mlmc/errors.hpp"
#include "mlmc/executor.hpp"
#include "mlmc/io.hpp"
#include "mlmc/pde/backend.hpp"
#include "mlmc/timeline.hpp"

namespace mlmc::scenarios {
namespace fs = std::filesystem;
using perf::MachineConfig;
using perf::RunTimeModel;
using perf::RuntimeFactorDistribution;

// ---------------------------------------------------------------------------
// Reference data

RunTimeModel reference_model() {
  return RunTimeModel({{167.0, 83.84, 42.30, 21.63, 11.60},
                       {171.0, 86.28, 44.53, 23.13, 12.41},
                       {177.0, 90.40, 47.07, 24.21, 12.97},
                       {179.0, 91.61, 48.27, 24.86, 13.63}});
}

std::vector<std::int64_t> reference_counts() { return {4123, 688, 108, 16}; }

MachineConfig reference_machine() { return {8192, 1, 4}; }

std::vector<double> reference_efficiencies() { return {1.0, 0.99, 0.96, 0.92, 0.86}; }

std::vector<double> reference_t0() { return {166.0, 168.0, 174.0, 177.0}; }

std::vector<double> reference_histogram() {
  std::vector<double> h;
  h.reserve(2048);
  for (int i = 0; i < 2045; ++i) h.push_back(44.0 + 2.0 * i / 2044.0);
  h.insert(h.end(), 3, 50.0);
  return h;
}

const std::vector<ReferenceRow>& reference_level_table() {
  static const std::vector<ReferenceRow> rows{
      {0, {167, 171, 177, 179}, {0.50, 0.67, 0.84, 1.00}, 694, 0.75},
      {1, {168, 173, 181, 183}, {0.50, 0.67, 0.84, 0.99}, 704, 0.74},
      {2, {127, 134, 188, 193}, {0.64, 0.86, 0.81, 0.96}, 642, 0.81},
      {3, {108, 139, 169, 199}, {0.74, 0.83, 0.89, 0.92}, 615, 0.85},
      {4, {104, 136, 181, 218}, {0.77, 0.84, 0.81, 0.86}, 640, 0.83},
  };
  return rows;
}

// ---------------------------------------------------------------------------
// Building blocks

std::vector<LevelTableRow> level_table(const MachineConfig& machine, const RunTimeModel& model,
                                       const std::vector<std::int64_t>& n,
                                       const std::vector<double>& eff, double t_opt) {
  std::vector<LevelTableRow> rows;
  const int smax = std::min(machine.s_window, model.thetas() - 1);
  for (int th = 0; th <= smax; ++th) {
    LevelTableRow row;
    row.theta = th;
    bool ok = true;
    for (int l = 0; l < static_cast<int>(n.size()); ++l) {
      if (!machine.fits(l, th)) {
        ok = false;
        break;
      }
      const auto m = eff.empty()
                         ? perf::level_metrics(machine, l, n[static_cast<std::size_t>(l)], th, model)
                         : perf::level_metrics(machine, l, n[static_cast<std::size_t>(l)], th,
                                               eff.at(static_cast<std::size_t>(th)));
      row.time.push_back(static_cast<double>(m.k_seq) * model.time(l, th));
      row.eta.push_back(m.eta);
    }
    if (!ok) continue;
    row.total_time = std::accumulate(row.time.begin(), row.time.end(), 0.0);
    row.total_eta = row.total_time > 0.0 ? t_opt / row.total_time : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

double global_kseq(const std::vector<std::int64_t>& n, const MachineConfig& machine) {
  double s = 0.0;
  for (std::size_t l = 0; l < n.size(); ++l)
    s += static_cast<double>(n[l]) * std::ldexp(1.0, 3 * static_cast<int>(l)) *
         static_cast<double>(machine.p0_min);
  return s / static_cast<double>(machine.p_max);
}

std::vector<std::int64_t> scaled_counts(const std::vector<std::int64_t>& base, double kseq,
                                        const MachineConfig& machine) {
  const double k0 = global_kseq(base, machine);
  if (!(k0 > 0.0) || !(kseq > 0.0)) throw std::invalid_argument("scaled_counts: k_seq must be > 0");
  std::vector<std::int64_t> n;
  for (auto b : base)
    n.push_back(std::max<std::int64_t>(1, std::llround(static_cast<double>(b) * kseq / k0)));
  return n;
}

sched::Genes default_start(const sched::HeteroProblem& problem) {
  const auto guess = sched::initial_guess_s0(problem.n_per_level, problem.model.column0(), problem.machine);
  return sched::repair(sched::genes_from_guess(guess, problem), problem);
}

SaStats sa_study(const sched::HeteroProblem& problem, const sched::SaConfig& config, int seeds,
                 const RandomStream& root, unsigned jobs, const sched::Genes& start_genes) {
  if (seeds < 1) throw std::invalid_argument("sa_study: seeds must be >= 1");
  const auto start = start_genes.empty() ? default_start(problem) : sched::repair(start_genes, problem);
  SaStats st;
  st.results.resize(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), jobs, [&](std::size_t i) {
    st.results[i] = sched::sa_optimize(start, config, problem, root.split(i));
  });
  for (const auto& r : st.results) st.per_seed.push_back(r.best_objective.makespan);
  st.min = *std::min_element(st.per_seed.begin(), st.per_seed.end());
  st.max = *std::max_element(st.per_seed.begin(), st.per_seed.end());
  st.avg = std::accumulate(st.per_seed.begin(), st.per_seed.end(), 0.0) / seeds;
  return st;
}

sched::Genes embed_single_scale(const sched::Genes& flat, const sched::HeteroProblem& problem) {
  auto g = sched::zero_genes(problem);
  for (std::size_t l = 0; l < g.size() && l < flat.size(); ++l)
    if (!flat[l].empty()) g[l][0] = flat[l][0];
  return g;
}

RobustDemo robust_demo(const std::vector<double>& histogram, const MachineConfig& machine,
                       std::int64_t n, int replications, const RandomStream& root) {
  if (histogram.empty()) throw std::invalid_argument("robust_demo: empty histogram");
  if (replications < 1) throw std::invalid_argument("robust_demo: replications must be >= 1");
  // The reference time is the histogram mean, so time * normalized factor
  // reproduces the observed run-times.
  const double mean = std::accumulate(histogram.begin(), histogram.end(), 0.0) /
                      static_cast<double>(histogram.size());
  const RunTimeModel model({{mean}}, RuntimeFactorDistribution::empirical(histogram));
  MachineConfig m = machine;
  m.s_window = 0;
  sched::ThetaChoice choice;
  choice.theta = {0};
  const std::vector<std::int64_t> counts{n};
  const auto schedule = sched::build_static_schedule(choice, counts, m, model);

  RobustDemo out;
  out.optimum = perf::theoretical_optimum(m, counts, std::vector<double>{mean});
  out.sample_sync.resize(static_cast<std::size_t>(replications));
  out.level_sync.resize(static_cast<std::size_t>(replications));
  sim::ExecutionMode mode;
  mode.sampling = perf::FactorSampling::without_replacement;
  mode.record_timeline = false;
  for (int r = 0; r < replications; ++r) {
    const auto s = root.split(static_cast<std::uint64_t>(r));
    mode.kind = sim::ExecutionKind::static_sample_sync;
    out.sample_sync[static_cast<std::size_t>(r)] = sim::simulate(schedule, model, mode, s).makespan;
    mode.kind = sim::ExecutionKind::static_level_sync;
    out.level_sync[static_cast<std::size_t>(r)] = sim::simulate(schedule, model, mode, s).makespan;
  }
  // "100 s" up to rounding of the simulated sums.
  const auto frac = [&](const std::vector<double>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x >= 99.99; })) /
           static_cast<double>(v.size());
  };
  out.p_sample_sync_100 = frac(out.sample_sync);
  out.p_level_sync_100 = frac(out.level_sync);
  return out;
}

BatchScheduler lesyhom_batches(const MachineConfig& machine, double b) {
  machine.validate();
  if (b < 0.0 || b > 1.0) throw std::invalid_argument("serial fraction must be in [0,1]");
  return [machine, b](std::span<const std::int64_t> requested, std::span<const double> cost) {
    std::vector<double> t0(requested.size(), 1.0);
    for (std::size_t l = 0; l < requested.size() && l < cost.size(); ++l)
      if (cost[l] > 0.0) t0[l] = cost[l];
    const auto model = RunTimeModel::from_surrogate(t0, b, machine.s_window);
    BatchPlan plan;
    plan.to_compute.assign(requested.size(), 0);
    for (std::size_t l = 0; l < requested.size(); ++l) {
      if (requested[l] <= 0) continue;
      const int lvl = static_cast<int>(l);
      const int th = sched::select_theta(lvl, requested[l], machine, model);
      const auto m = perf::level_metrics(machine, lvl, requested[l], th, model);
      plan.to_compute[l] = m.k_seq * m.j_parallel;
      plan.makespan += static_cast<double>(m.k_seq) * model.time(lvl, th);
    }
    return plan;
  };
}

// ---------------------------------------------------------------------------
// Scenario plumbing

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v, const char* sep = " ") {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

class Session {
 public:
  Session(const Options& o, std::ostream& log, std::uint64_t scenario_id)
      : opt(o), cfg(o.config), log(log), root(RandomStream(o.seed).split(scenario_id)) {
    fs::create_directories(o.out_dir);
  }

  fs::path path(const std::string& name) {
    const auto p = opt.out_dir / name;
    out.files.push_back(p);
    return p;
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (opt.out_dir / name).string());
    f << content;
  }

  void check(const std::string& name, bool pass, const std::string& detail) {
    out.checks.push_back({name, pass, detail});
  }

  int seeds(const std::string& key, int fallback) const {
    return opt.seeds ? *opt.seeds : static_cast<int>(cfg.get_int(key, fallback));
  }

  Outcome finish() {
    if (opt.check) {
      for (const auto& c : out.checks) {
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        if (!c.pass) out.exit_code = kExitCheckFailed;
      }
    }
    for (const auto& f : out.files) log << "wrote " << f.string() << "\n";
    return std::move(out);
  }

  const Options& opt;
  const Config& cfg;
  std::ostream& log;
  RandomStream root;
  Outcome out;
};

MachineConfig machine_from(const Config& c, const std::string& sec, MachineConfig def) {
  MachineConfig m;
  m.p_max = c.get_int(sec + ".p_max", def.p_max);
  m.p0_min = c.get_int(sec + ".p0_min", def.p0_min);
  m.s_window = static_cast<int>(c.get_int(sec + ".s_window", def.s_window));
  m.validate();
  return m;
}

RunTimeModel matrix_model(const Config& c) {
  if (c.has("model.t_matrix")) return RunTimeModel(io::read_matrix_csv(c.get_path("model.t_matrix", {})));
  return reference_model();
}

std::vector<double> level0_times(const Config& c) {
  return c.get_doubles("model.t0", matrix_model(c).column0());
}

RuntimeFactorDistribution factors_from(double var) {
  return var > 0.0 ? RuntimeFactorDistribution::half_normal(var) : RuntimeFactorDistribution::constant();
}

sched::SaConfig sa_from(const Session& s, int budget, sched::Mutation mutation) {
  const Config& c = s.cfg;
  sched::SaConfig sa;
  sa.t0 = c.get_double("sa.t0", sa.t0);
  sa.cooling = c.get_double("sa.cooling", sa.cooling);
  sa.budget = s.opt.budget ? *s.opt.budget : static_cast<int>(c.get_int("sa.budget", budget));
  sa.mutation = c.has("sa.mutation") ? sched::parse_mutation(c.get_string("sa.mutation", "")) : mutation;
  sa.mutation_rate = c.get_double("sa.mutation_rate", sa.mutation_rate);
  sa.hybrid_rate = c.get_double("sa.hybrid_rate", sa.hybrid_rate);
  sa.gaussian_scale = c.get_double("sa.gaussian_scale", sa.gaussian_scale);
  sa.aux_objective = c.get_bool("sa.aux_objective", sa.aux_objective);
  sa.validate();
  return sa;
}

// S = 0 view of a problem: one column (t_{l,0}), no strong scaling.
sched::HeteroProblem single_scale(const sched::HeteroProblem& p) {
  sched::HeteroProblem q = p;
  q.machine.s_window = 0;
  std::vector<std::vector<double>> col;
  for (double t : p.model.column0()) col.push_back({t});
  q.model = RunTimeModel(col, p.model.factors());
  return q;
}

sim::ExecutionMode mode_of(sim::ExecutionKind kind, bool timeline = false) {
  sim::ExecutionMode m;
  m.kind = kind;
  m.record_timeline = timeline;
  return m;
}

// ---------------------------------------------------------------------------

Outcome tab_level_eff(const Options& o, std::ostream& log) {
  Session s(o, log, 1);
  const auto& c = s.cfg;
  const auto machine = machine_from(c, "machine", reference_machine());
  const auto model = matrix_model(c);
  const auto n = c.get_ints("samples.n", reference_counts());
  const auto eff = c.get_doubles("model.eff", reference_efficiencies());
  const auto t0 = c.get_doubles("model.t0_opt", reference_t0());
  const double t_opt = perf::theoretical_optimum(machine, n, t0);
  const auto rows = level_table(machine, model, n, eff, t_opt);

  std::ostringstream csv;
  csv << "theta";
  for (std::size_t l = 0; l < n.size(); ++l) csv << ",time" << l << ",eta" << l;
  csv << ",time,eta\n";
  log << "theta |" << std::fixed << std::setprecision(2);
  for (std::size_t l = 0; l < n.size(); ++l) log << "   time" << l << "  eta" << l << " |";
  log << "   total   eta\n";
  for (const auto& r : rows) {
    csv << r.theta;
    log << std::setw(5) << r.theta << " |";
    for (std::size_t l = 0; l < r.time.size(); ++l) {
      csv << "," << num(r.time[l]) << "," << num(r.eta[l]);
      log << std::setw(7) << r.time[l] << std::setw(6) << r.eta[l] << " |";
    }
    csv << "," << num(r.total_time) << "," << num(r.total_eta) << "\n";
    log << std::setw(8) << r.total_time << std::setw(6) << r.total_eta << "\n";
  }
  s.write("level_table.csv", csv.str());

  const auto choice = sched::select_thetas(n, machine, model);
  const auto schedule = sched::build_static_schedule(choice, n, machine, model);
  const auto report =
      sim::simulate(schedule, model, mode_of(sim::ExecutionKind::static_level_sync, true), s.root);
  const double efficiency = t_opt / report.makespan;
  log << "LeSyHom theta = (" << join(choice.theta, ",") << "), predicted " << choice.total()
      << " s, simulated " << report.makespan << " s, t_opt " << t_opt << " s, efficiency "
      << efficiency << "\n"
      << std::defaultfloat;
  s.write("lesyhom_schedule.json", io::to_json(schedule) + "\n");
  s.write("lesyhom_report.json", io::to_json(report) + "\n");
  sim::export_timeline(report, sim::TimelineFormat::svg, s.path("lesyhom_timeline.svg").string());

  // Table comparison (level entries only).
  bool shape = rows.size() == reference_level_table().size() && n.size() == 4;
  double worst_t = 0.0, worst_eta = 0.0;
  if (shape)
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t l = 0; l < 4; ++l) {
        const auto& ref = reference_level_table()[i];
        if (rows[i].theta != ref.theta) shape = false;
        worst_t = std::max(worst_t, std::abs(rows[i].time[l] - ref.time[l]));
        worst_eta = std::max(worst_eta, std::abs(rows[i].eta[l] - ref.eta[l]));
      }
  s.check("level times", shape && worst_t <= 1.0, "max |time - table| = " + num(worst_t) + " s");
  s.check("level eta", shape && worst_eta <= 0.02, "max |eta - table| = " + num(worst_eta));
  s.check("selection", choice.theta == std::vector<int>{4, 2, 3, 0} && std::lround(choice.total()) == 586,
          "theta = (" + join(choice.theta, ",") + "), total " + num(choice.total()) + " s");
  s.check("t_opt", std::abs(t_opt - 520.0) <= 1.0, num(t_opt) + " s");
  s.check("efficiency", std::abs(efficiency - 0.89) <= 0.01, num(efficiency));
  return s.finish();
}

sched::HeteroProblem s4_problem(const Config& c) {
  sched::HeteroProblem p;
  p.machine = machine_from(c, "machine", reference_machine());
  p.model = matrix_model(c);
  p.n_per_level = c.get_ints("samples.n", reference_counts());
  p.validate();
  return p;
}

void write_sa_outputs(Session& s, const std::string& stem, const sched::HeteroProblem& problem,
                      const SaStats& st) {
  std::ostringstream csv;
  csv << "seed,makespan,idle,evaluations\n";
  for (std::size_t i = 0; i < st.results.size(); ++i)
    csv << i << "," << num(st.results[i].best_objective.makespan) << ","
        << st.results[i].best_objective.idle << "," << st.results[i].evaluations << "\n";
  s.write(stem + "_seeds.csv", csv.str());
  const auto best = std::min_element(st.results.begin(), st.results.end(), [](const auto& a, const auto& b) {
    return a.best_objective.better_than(b.best_objective);
  });
  s.write(stem + "_best.json", io::to_json(*best) + "\n");
  std::ostringstream trace;
  io::write_sa_trace_csv(trace, best->trace);
  s.write(stem + "_trace.csv", trace.str());
  const auto report = sim::simulate(best->schedule, problem,
                                    mode_of(sim::ExecutionKind::static_level_sync, true), s.root);
  sim::export_timeline(report, sim::TimelineFormat::svg, s.path(stem + "_timeline.svg").string());
}

Outcome sched_s0(const Options& o, std::ostream& log) {
  Session s(o, log, 2);
  const auto problem = single_scale(s4_problem(s.cfg));
  const auto guess = sched::initial_guess_s0(problem.n_per_level, problem.model.column0(), problem.machine);
  log << "initial guess N_par = (" << join(guess.n_par, ",") << "), k_seq = (" << join(guess.k_seq, ",")
      << "), makespan " << num(guess.makespan) << " s\n";

  const auto sa = sa_from(s, 2000, sched::Mutation::gaussian);
  const int seeds = s.seeds("sa.seeds", 10);
  const auto st = sa_study(problem, sa, seeds, s.root, s.opt.jobs);
  log << "SA " << to_string(sa.mutation) << ", budget " << sa.budget << ", " << seeds
      << " seeds: min/avg/max = " << num(st.min) << "/" << num(st.avg) << "/" << num(st.max) << " s\n";
  write_sa_outputs(s, "sa_s0", problem, st);

  const auto witness_n = s.cfg.get_ints("check.witness", {1031, 172, 36, 6});
  sched::Genes witness = sched::zero_genes(problem);
  for (std::size_t l = 0; l < witness.size() && l < witness_n.size(); ++l) witness[l][0] = witness_n[l];
  const auto wobj = sched::objective(witness, problem);
  const auto wproc = sched::processors_used(witness, problem.machine);
  log << "witness (" << join(witness_n, ",") << "): makespan " << num(wobj.makespan) << " s on " << wproc
      << " processors\n";

  s.check("initial guess", std::abs(guess.makespan - 716.0) < 1e-6, num(guess.makespan) + " s");
  s.check("all seeds 684", std::abs(st.max - 684.0) < 1e-6 && std::abs(st.min - 684.0) < 1e-6,
          "min/avg/max " + num(st.min) + "/" + num(st.avg) + "/" + num(st.max));
  s.check("witness", wobj.feasible && std::abs(wobj.makespan - 684.0) < 1e-6 && wproc >= 7783,
          num(wobj.makespan) + " s on " + std::to_string(wproc) + " processors");
  return s.finish();
}

Outcome sched_s4_mutants(const Options& o, std::ostream& log) {
  Session s(o, log, 3);
  const auto problem = s4_problem(s.cfg);
  std::vector<sched::Mutation> ops;
  for (const auto& name : [&] {
         std::vector<std::string> v;
         std::istringstream is(s.cfg.get_string(
             "sa.mutations", "random-reset,non-uniform,gaussian,hybrid-a,hybrid-b"));
         for (std::string t; std::getline(is, t, ',');) {
           t.erase(0, t.find_first_not_of(" \t"));
           t.erase(t.find_last_not_of(" \t") + 1);
           if (!t.empty()) v.push_back(t);
         }
         return v;
       }())
    ops.push_back(sched::parse_mutation(name));
  std::vector<std::int64_t> budgets =
      s.opt.budget ? std::vector<std::int64_t>{*s.opt.budget} : s.cfg.get_ints("sa.budgets", {1000, 4000});
  const int seeds = s.seeds("sa.seeds", 10);
  const int sets = static_cast<int>(s.cfg.get_int("sa.seed_sets", 3));
  const std::int64_t order_budget = s.cfg.get_int("check.order_budget", 4000);

  // results[(op, budget)][set]
  std::map<std::pair<int, std::int64_t>, std::vector<SaStats>> results;
  std::ostringstream csv;
  csv << "mutation,budget,seed_set,min,avg,max\n";
  log << std::left << std::setw(14) << "mutation" << std::right << std::setw(8) << "budget"
      << std::setw(5) << "set" << std::setw(10) << "min" << std::setw(10) << "avg" << std::setw(10)
      << "max\n"
      << std::fixed << std::setprecision(2);
  for (std::size_t oi = 0; oi < ops.size(); ++oi)
    for (auto budget : budgets) {
      sched::SaConfig sa = sa_from(s, static_cast<int>(budget), ops[oi]);
      sa.budget = static_cast<int>(budget);
      sa.mutation = ops[oi];
      const int nsets = budget == order_budget ? sets : 1;
      for (int set = 0; set < nsets; ++set) {
        const auto root = s.root.split(static_cast<std::uint64_t>(set)).split(static_cast<std::uint64_t>(budget));
        auto st = sa_study(problem, sa, seeds, root, s.opt.jobs);
        csv << to_string(ops[oi]) << "," << budget << "," << set << "," << num(st.min) << ","
            << num(st.avg) << "," << num(st.max) << "\n";
        log << std::left << std::setw(14) << to_string(ops[oi]) << std::right << std::setw(8) << budget
            << std::setw(5) << set << std::setw(10) << st.min << std::setw(10) << st.avg
            << std::setw(10) << st.max << "\n";
        if (set == 0 && ops[oi] == sched::Mutation::hybrid_b && budget == order_budget)
          write_sa_outputs(s, "sa_s4_hybrid_b", problem, st);
        results[{static_cast<int>(oi), budget}].push_back(std::move(st));
      }
    }
  log << std::defaultfloat;
  s.write("mutants.csv", csv.str());

  auto find = [&](sched::Mutation m, std::int64_t budget) -> const std::vector<SaStats>* {
    for (std::size_t oi = 0; oi < ops.size(); ++oi)
      if (ops[oi] == m) {
        auto it = results.find({static_cast<int>(oi), budget});
        return it == results.end() ? nullptr : &it->second;
      }
    return nullptr;
  };
  if (const auto* hb = find(sched::Mutation::hybrid_b, 4000)) {
    const auto& st = hb->front();
    const auto good = std::count_if(st.per_seed.begin(), st.per_seed.end(), [](double v) { return v <= 612.0; });
    s.check("hybrid-b 4000: seeds <= 612 s", good >= std::max(1, seeds - 1),
            std::to_string(good) + " of " + std::to_string(seeds));
    s.check("hybrid-b 4000: best", std::abs(st.min - 603.9) <= 0.5, num(st.min) + " s");
  }
  if (const auto* hb = find(sched::Mutation::hybrid_b, 1000))
    s.check("hybrid-b 1000: best <= 628 s", hb->front().min <= 628.0, num(hb->front().min) + " s");

  // Operator ordering on average makespan; one violating seed set allowed
  // per comparison.
  const auto* rr = find(sched::Mutation::random_reset, order_budget);
  const auto* nu = find(sched::Mutation::non_uniform, order_budget);
  const auto* ga = find(sched::Mutation::gaussian, order_budget);
  const auto* ha = find(sched::Mutation::hybrid_a, order_budget);
  const auto* hb = find(sched::Mutation::hybrid_b, order_budget);
  if (rr && nu && ga && ha && hb) {
    auto compare = [&](const std::string& name, auto&& lhs, auto&& rhs) {
      int bad = 0;
      std::string detail;
      for (int set = 0; set < sets; ++set) {
        const double a = lhs(set), b = rhs(set);
        if (a > b + 1e-9) ++bad;
        detail += (set ? "; " : "") + num(a) + " vs " + num(b);
      }
      s.check(name, bad <= 1, detail);
    };
    auto avg = [](const std::vector<SaStats>* v) {
      return [v](int set) { return (*v)[static_cast<std::size_t>(set)].avg; };
    };
    compare("order hybrid-b <= hybrid-a", avg(hb), avg(ha));
    compare("order hybrid-a <= gaussian", avg(ha), avg(ga));
    compare("order gaussian <= min(random-reset, non-uniform)", avg(ga), [&](int set) {
      return std::min((*rr)[static_cast<std::size_t>(set)].avg, (*nu)[static_cast<std::size_t>(set)].avg);
    });
  }
  return s.finish();
}

Outcome fig_kseq_sweep(const Options& o, std::ostream& log) {
  Session s(o, log, 4);
  const auto& c = s.cfg;
  const auto machine = machine_from(c, "machine", reference_machine());
  const auto model = matrix_model(c);
  const auto base = c.get_ints("samples.base", {1366, 228, 36, 5});
  std::vector<double> kseqs;
  for (int i = 1; i <= 17; ++i) kseqs.push_back(0.2 * i);
  kseqs = c.get_doubles("sweep.kseq", kseqs);
  const int seeds = s.seeds("sweep.seeds", 3);
  const auto sa_het = sa_from(s, 4000, sched::Mutation::hybrid_b);
  auto sa_flat = sa_het;
  sa_flat.mutation = sched::Mutation::gaussian;
  const auto t0 = model.column0();

  std::ostringstream csv;
  csv << "kseq,kseq_actual,optimum,bound_time,LeSyHom,noStScHet,StScHet\n";
  log << "  kseq  optimum    bound  LeSyHom noStScHet  StScHet\n" << std::fixed << std::setprecision(1);
  int within = 0;
  std::string worst;
  for (std::size_t i = 0; i < kseqs.size(); ++i) {
    sched::HeteroProblem p;
    p.machine = machine;
    p.model = model;
    p.n_per_level = scaled_counts(base, kseqs[i], machine);
    const double opt = perf::theoretical_optimum(machine, p.n_per_level, t0);
    const double lesy = sched::select_thetas(p.n_per_level, machine, model).total();
    const auto gap = perf::imbalance_gap(machine, lesy, opt, p.n_per_level, t0);
    const auto root = s.root.split(i);
    const auto flat_st = sa_study(single_scale(p), sa_flat, seeds, root.split(2), s.opt.jobs);
    const auto& flat_best = *std::min_element(flat_st.results.begin(), flat_st.results.end(),
                                              [](const auto& a, const auto& b) {
                                                return a.best_objective.better_than(b.best_objective);
                                              });
    const double flat = flat_st.min;
    const double het =
        sa_study(p, sa_het, seeds, root.split(1), s.opt.jobs, embed_single_scale(flat_best.best, p)).min;
    csv << num(kseqs[i]) << "," << num(gap.k_seq_global) << "," << num(opt) << ","
        << num(opt * (1.0 + gap.bound)) << "," << num(lesy) << "," << num(flat) << "," << num(het) << "\n";
    log << std::setw(6) << kseqs[i] << std::setw(9) << opt << std::setw(9) << opt * (1.0 + gap.bound)
        << std::setw(9) << lesy << std::setw(10) << flat << std::setw(9) << het << "\n";
    if (gap.within_bound())
      ++within;
    else
      worst += " k_seq=" + num(kseqs[i]);
  }
  log << std::defaultfloat;
  s.write("kseq_sweep.csv", csv.str());
  s.check("LeSyHom within imbalance bound", within == static_cast<int>(kseqs.size()),
          std::to_string(within) + " of " + std::to_string(kseqs.size()) + (worst.empty() ? "" : ";" + worst));
  return s.finish();
}

Outcome fig_serial_fraction(const Options& o, std::ostream& log) {
  Session s(o, log, 5);
  const auto& c = s.cfg;
  const auto machine = machine_from(c, "machine", reference_machine());
  const auto t0 = level0_times(c);
  const auto base = c.get_ints("samples.base", {1366, 228, 36, 5});
  const auto bs = c.get_doubles("sweep.b", {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0});
  const auto kseqs = c.get_doubles("sweep.kseq", {0.75, 3.0});
  const int seeds = s.seeds("sweep.seeds", 3);
  const auto sa = sa_from(s, 4000, sched::Mutation::hybrid_b);

  std::ostringstream csv;
  csv << "kseq,b,optimum,LeSyHom,StScHet\n";
  log << "  kseq      B  optimum  LeSyHom  StScHet\n" << std::fixed;
  bool above = true;
  for (std::size_t ki = 0; ki < kseqs.size(); ++ki)
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      sched::HeteroProblem p;
      p.machine = machine;
      p.model = RunTimeModel::from_surrogate(t0, bs[bi], machine.s_window);
      p.n_per_level = scaled_counts(base, kseqs[ki], machine);
      const double opt = perf::theoretical_optimum(machine, p.n_per_level, t0);
      const double lesy = sched::select_thetas(p.n_per_level, machine, p.model).total();
      const double het = sa_study(p, sa, seeds, s.root.split(ki).split(bi), s.opt.jobs).min;
      above = above && lesy >= opt * (1 - 1e-12) && het >= opt * (1 - 1e-12);
      csv << num(kseqs[ki]) << "," << num(bs[bi]) << "," << num(opt) << "," << num(lesy) << "," << num(het)
          << "\n";
      log << std::setprecision(2) << std::setw(6) << kseqs[ki] << std::setw(7) << bs[bi]
          << std::setprecision(1) << std::setw(9) << opt << std::setw(9) << lesy << std::setw(9) << het
          << "\n";
    }
  log << std::defaultfloat;
  s.write("serial_fraction.csv", csv.str());
  s.check("run-times not below the optimum", above, above ? "ok" : "a strategy beat t_opt");
  return s.finish();
}

const std::vector<std::string> kGridStrategies{"SaSyHom", "LeSyHom",  "RuRoHom",  "DyLeSyHom",
                                               "DyRuRoHom", "StScHet", "noStScHet"};

Outcome fig_efficiency_grid(const Options& o, std::ostream& log) {
  Session s(o, log, 6);
  const auto& c = s.cfg;
  const auto machine = machine_from(c, "machine", reference_machine());
  const auto t0 = level0_times(c);
  const auto base = c.get_ints("samples.base", {1366, 228, 36, 5});
  const auto mults = c.get_doubles("sweep.multipliers", {1.0, 5.0, 24.0});
  const auto bs = c.get_doubles("sweep.b", {0.01, 0.1, 1.0});
  const auto vars = c.get_doubles("sweep.var", {0.0, 0.5, 2.0});
  const int reps = s.seeds("sweep.replications", 10);
  const int mu_start = static_cast<int>(c.get_int("robust.mu_start", 64));
  const int mu_cap = static_cast<int>(c.get_int("robust.mu_cap", 500));
  const auto sa = sa_from(s, 2000, sched::Mutation::hybrid_b);
  auto sa_flat = sa;
  sa_flat.mutation = sched::Mutation::gaussian;

  std::ostringstream csv;
  csv << "multiplier,kseq,b,var";
  for (const auto& n : kGridStrategies) csv << "," << n;
  csv << "\n";
  log << "  kseq      B   Var";
  for (const auto& n : kGridStrategies) log << std::setw(10) << n;
  log << "\n";
  bool var0_equal = true;
  std::string var0_detail;

  for (std::size_t mi = 0; mi < mults.size(); ++mi)
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      const auto n = [&] {
        std::vector<std::int64_t> v;
        for (auto b : base) v.push_back(std::llround(static_cast<double>(b) * mults[mi]));
        return v;
      }();
      const auto model = RunTimeModel::from_surrogate(t0, bs[bi], machine.s_window);
      sched::HeteroProblem p{machine, model, n, {}};
      const auto cell = s.root.split(mi).split(bi);
      // Heterogeneous matrices do not depend on the variation.
      const auto flat_problem = single_scale(p);
      const auto flat_sa = sa_study(flat_problem, sa_flat, 1, cell.split(2), 1).results.front();
      const auto& flat = flat_sa.schedule;
      const auto het =
          sa_study(p, sa, 1, cell.split(1), 1, embed_single_scale(flat_sa.best, p)).results.front().schedule;
      const auto fixed = sched::select_thetas(n, machine, model);
      const auto fixed_schedule = sched::build_static_schedule(fixed, n, machine, model);

      for (std::size_t vi = 0; vi < vars.size(); ++vi) {
        const auto dist = factors_from(vars[vi]);
        const auto vmodel = model.with_factors(dist);
        const auto vcell = cell.split(100 + vi);
        const auto robust = sched::select_thetas_robust(n, machine, vmodel, dist, vcell.split(3), mu_start, mu_cap);
        const auto robust_schedule = sched::build_static_schedule(robust, n, machine, vmodel);
        std::vector<double> t_mean(t0.size(), dist.mean());
        const double opt = perf::theoretical_optimum(machine, n, t0, t_mean);

        auto hp = p;
        hp.model = vmodel;
        auto fp = flat_problem;
        fp.model = fp.model.with_factors(dist);
        std::vector<std::vector<double>> ms(kGridStrategies.size(), std::vector<double>(static_cast<std::size_t>(reps)));
        parallel_for(static_cast<std::size_t>(reps), s.opt.jobs, [&](std::size_t r) {
          const auto rs = vcell.split(1000 + r);
          using K = sim::ExecutionKind;
          ms[0][r] = sim::simulate(fixed_schedule, vmodel, mode_of(K::static_sample_sync), rs).makespan;
          ms[1][r] = sim::simulate(fixed_schedule, vmodel, mode_of(K::static_level_sync), rs).makespan;
          ms[2][r] = sim::simulate(robust_schedule, vmodel, mode_of(K::static_level_sync), rs).makespan;
          ms[3][r] = sim::simulate(fixed_schedule, vmodel, mode_of(K::dynamic), rs).makespan;
          ms[4][r] = sim::simulate(robust_schedule, vmodel, mode_of(K::dynamic), rs).makespan;
          ms[5][r] = sim::simulate(het, hp, mode_of(K::static_level_sync), rs).makespan;
          ms[6][r] = sim::simulate(flat, fp, mode_of(K::static_level_sync), rs).makespan;
        });
        std::vector<double> eff;
        for (const auto& m : ms) eff.push_back(opt / (std::accumulate(m.begin(), m.end(), 0.0) / reps));

        csv << num(mults[mi]) << "," << num(global_kseq(n, machine)) << "," << num(bs[bi]) << ","
            << num(vars[vi]);
        for (double e : eff) csv << "," << num(e);
        csv << "\n";
        log << std::fixed << std::setprecision(2) << std::setw(6) << global_kseq(n, machine)
            << std::setw(7) << bs[bi] << std::setw(6) << vars[vi] << std::setprecision(3);
        for (double e : eff) log << std::setw(10) << e;
        log << "\n" << std::defaultfloat;
        if (vars[vi] == 0.0) {
          const double lo = *std::min_element(eff.begin(), eff.begin() + 5);
          const double hi = *std::max_element(eff.begin(), eff.begin() + 5);
          if (hi - lo > 1e-9) {
            var0_equal = false;
            var0_detail += " kseq x" + num(mults[mi]) + " B=" + num(bs[bi]);
          }
        }
      }
    }
  s.write("efficiency_grid.csv", csv.str());
  s.check("Var=0: homogeneous strategies agree", var0_equal, var0_equal ? "ok" : "differ at" + var0_detail);
  return s.finish();
}

Outcome runtime_robust_demo(const Options& o, std::ostream& log) {
  Session s(o, log, 7);
  const auto& c = s.cfg;
  const auto hist = c.has("variation.histogram") ? io::read_histogram_csv(c.get_path("variation.histogram", {}))
                                                  : reference_histogram();
  const auto machine = machine_from(c, "variation", {524288, 512, 0});
  const auto n = c.get_int("variation.n", 2048);
  const int reps = s.seeds("variation.replications", 10000);
  const auto demo = robust_demo(hist, machine, n, reps, s.root);

  std::ostringstream csv;
  csv << "replication,SaSyHom,LeSyHom\n";
  for (int r = 0; r < reps; ++r)
    csv << r << "," << num(demo.sample_sync[static_cast<std::size_t>(r)]) << ","
        << num(demo.level_sync[static_cast<std::size_t>(r)]) << "\n";
  s.write("robust_demo.csv", csv.str());
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  log << "optimum " << num(demo.optimum) << " s over " << reps << " replications\n"
      << "SaSyHom: mean makespan " << num(mean(demo.sample_sync)) << " s, P(100 s) = "
      << num(demo.p_sample_sync_100) << "\n"
      << "LeSyHom: mean makespan " << num(mean(demo.level_sync)) << " s, P(>= 100 s) = "
      << num(demo.p_level_sync_100) << "\n";
  s.check("SaSyHom P(100 s) in [0.70, 0.80]",
          demo.p_sample_sync_100 >= 0.70 && demo.p_sample_sync_100 <= 0.80, num(demo.p_sample_sync_100));
  s.check("LeSyHom P(>= 100 s) <= 0.02", demo.p_level_sync_100 <= 0.02, num(demo.p_level_sync_100));
  return s.finish();
}

Outcome adaptive_synthetic(const Options& o, std::ostream& log) {
  Session s(o, log, 8);
  const auto& c = s.cfg;
  SyntheticRates rates;
  rates.rates.alpha = c.get_double("adaptive.alpha", 1.0 / 3.0);
  rates.rates.beta = c.get_double("adaptive.beta", 2.0 / 3.0);
  rates.rates.gamma = c.get_double("adaptive.gamma", 1.0);
  rates.rates.c_b = c.get_double("adaptive.c_b", 0.1);
  rates.rates.c_v = c.get_double("adaptive.c_v", 0.5);
  rates.rates.c_c = c.get_double("adaptive.c_c", 1.0);
  rates.q_limit = c.get_double("adaptive.q_limit", 1.0);
  rates.rates.validate();
  const int max_level = static_cast<int>(c.get_int("adaptive.max_level", 6));
  const SyntheticBackend backend(rates, max_level);

  AdaptiveOptions ao;
  ao.tol.eps = s.opt.eps ? *s.opt.eps : c.get_double("adaptive.eps", 0.02);
  ao.tol.split_weight = c.get_double("adaptive.split_weight", 0.5);
  ao.alpha = rates.rates.alpha;
  ao.n_init = c.get_int("adaptive.n_init", 16);
  ao.initial_levels = static_cast<int>(c.get_int("adaptive.initial_levels", 2));
  ao.eps_mode = c.get_string("adaptive.eps_mode", "fixed") == "balance" ? EpsilonMode::balance
                                                                        : EpsilonMode::fixed_split;
  const int reps = s.seeds("adaptive.repetitions", 100);

  std::vector<MlmcResult> res(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), s.opt.jobs, [&](std::size_t r) {
    try {
      res[r] = run_adaptive(backend, s.root.split(r), ao);
    } catch (const NotConverged& e) {
      res[r] = e.partial();
    }
  });

  int accurate = 0, allocated = 0, converged = 0;
  std::ostringstream csv;
  csv << "repetition,estimate,error,final_L,iterations,converged,n_within_2x,final_n\n";
  for (int r = 0; r < reps; ++r) {
    const auto& m = res[static_cast<std::size_t>(r)];
    const double err = std::abs(m.estimate - rates.q_limit);
    std::vector<double> v, cst;
    for (int l = 0; l <= m.final_L; ++l) {
      v.push_back(rates.var_y(l));
      cst.push_back(rates.cost(l));
    }
    // The loop never drops below its starting counts, so those are the floor.
    auto opt_n = optimal_sample_counts(v, cst, ao.tol.eps_sampling());
    for (std::size_t l = 0; l < opt_n.size(); ++l)
      opt_n[l] = std::max(opt_n[l], l < ao.initial_n.size() ? ao.initial_n[l] : ao.n_init);
    bool within = m.final_n.size() == opt_n.size();
    for (std::size_t l = 0; within && l < opt_n.size(); ++l) {
      const double ratio = static_cast<double>(m.final_n[l]) / static_cast<double>(opt_n[l]);
      within = ratio >= 0.5 && ratio <= 2.0;
    }
    accurate += err <= 3.0 * ao.tol.eps;
    allocated += within;
    converged += m.converged;
    csv << r << "," << num(m.estimate) << "," << num(err) << "," << m.final_L << "," << m.history.size() << ","
        << m.converged << "," << within << "," << join(m.final_n, " ") << "\n";
  }
  s.write("adaptive_synthetic.csv", csv.str());
  s.write("adaptive_synthetic_run0.json", io::to_json(res.front()) + "\n");
  const auto& first = res.front();
  log << "eps " << ao.tol.eps << ", " << reps << " repetitions; run 0: estimate " << num(first.estimate)
      << ", L = " << first.final_L << ", N = (" << join(first.final_n, ",") << "), "
      << first.history.size() << " iterations\n"
      << "within 3 eps: " << accurate << ", N within 2x of optimal: " << allocated
      << ", converged: " << converged << "\n";
  const int need = (95 * reps + 99) / 100;
  s.check("estimates within 3 eps", accurate >= need,
          std::to_string(accurate) + " of " + std::to_string(reps));
  s.check("N within factor 2 of optimal", allocated == reps,
          std::to_string(allocated) + " of " + std::to_string(reps));
  return s.finish();
}

Outcome adaptive_pde(const Options& o, std::ostream& log) {
  Session s(o, log, 9);
  const auto& c = s.cfg;
  pde::PdeOptions po;
  po.n0 = static_cast<int>(c.get_int("pde.n0", po.n0));
  po.max_level = static_cast<int>(c.get_int("pde.max_level", po.max_level));
  po.covariance.sigma2 = c.get_double("pde.sigma2", po.covariance.sigma2);
  po.covariance.lambda = c.get_double("pde.lambda", po.covariance.lambda);
  po.qoi.kind = c.get_string("pde.qoi", "flux") == "point" ? pde::QoiKind::point : pde::QoiKind::flux;
  po.source = c.get_double("pde.source", po.source);
  po.seconds_per_update = c.get_double("pde.seconds_per_update", po.seconds_per_update);
  po.validate();
  const pde::PdeBackend backend(po);

  AdaptiveOptions ao;
  ao.tol.eps = s.opt.eps ? *s.opt.eps : c.get_double("pde.eps", 0.01);
  ao.tol.split_weight = c.get_double("pde.split_weight", 0.5);
  // Point values converge at second order in h, the one-sided flux at first.
  ao.alpha = c.get_double("pde.alpha", po.qoi.kind == pde::QoiKind::point ? 2.0 / 3.0 : 1.0 / 3.0);
  ao.initial_n = c.get_ints("pde.initial_n", {16, 4, 2, 2});
  ao.initial_levels = static_cast<int>(c.get_int("pde.initial_levels", 4));
  ao.initial_levels = std::min(ao.initial_levels, po.max_level + 1);
  const auto machine = machine_from(c, "pde", {512, 1, 4});
  const auto scheduler = lesyhom_batches(machine, c.get_double("pde.serial_fraction", c.get_double("model.serial_fraction", 0.02)));

  MlmcResult r;
  bool converged = true;
  try {
    r = run_adaptive(backend, s.root, ao, SampleExecutor(s.opt.jobs), scheduler);
  } catch (const NotConverged& e) {
    r = e.partial();
    converged = false;
  }
  s.write("adaptive_pde.json", io::to_json(r) + "\n");
  std::ostringstream csv;
  csv << "level,n,mean,variance,cost\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l)
    csv << l << "," << r.levels[l].n << "," << num(r.levels[l].mean) << "," << num(r.levels[l].s2) << ","
        << num(r.levels[l].cost) << "\n";
  s.write("adaptive_pde_levels.csv", csv.str());
  log << "estimate " << num(r.estimate) << " (bias " << num(r.bias) << ", sampling variance "
      << num(r.sampling_variance) << "), L = " << r.final_L << ", N = (" << join(r.final_n, ",")
      << "), " << r.history.size() << " iterations, simulated time " << num(r.simulated_time) << " s\n";
  bool decreasing = r.final_n.size() >= 2;
  for (std::size_t l = 1; l < r.final_n.size(); ++l) decreasing = decreasing && r.final_n[l] <= r.final_n[l - 1];
  s.check("converged", converged && r.converged, converged ? "ok" : "iteration limit");
  s.check("N decreasing with level", decreasing && r.final_n.back() < r.final_n.front(),
          "(" + join(r.final_n, ",") + ")");
  return s.finish();
}

using Runner = Outcome (*)(const Options&, std::ostream&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"tab-level-eff", tab_level_eff},
      {"sched-s0", sched_s0},
      {"sched-s4-mutants", sched_s4_mutants},
      {"fig-kseq-sweep", fig_kseq_sweep},
      {"fig-serial-fraction", fig_serial_fraction},
      {"fig-efficiency-grid", fig_efficiency_grid},
      {"runtime-robust-demo", runtime_robust_demo},
      {"adaptive-synthetic", adaptive_synthetic},
      {"adaptive-pde", adaptive_pde},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return n;
}

bool is_scenario(const std::string& name) {
  return std::find(names().begin(), names().end(), name) != names().end();
}

Outcome run(const std::string& name, const Options& options, std::ostream& log) {
  for (const auto& [n, fn] : registry())
    if (n == name) return fn(options, log);
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

}  // namespace mlmc::scenarios
