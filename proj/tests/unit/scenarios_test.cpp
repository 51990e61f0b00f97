#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mlmc/scenarios.hpp"

using namespace mlmc;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mlmc_scenarios_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

scenarios::Options options(const std::string& ini, const fs::path& out) {
  scenarios::Options o;
  std::istringstream in(ini);
  o.config = Config::parse(in);
  o.out_dir = out;
  return o;
}
}  // namespace

TEST(Scenarios, Names) {
  const auto& n = scenarios::names();
  for (const char* want : {"tab-level-eff", "sched-s0", "sched-s4-mutants", "fig-kseq-sweep", "fig-serial-fraction",
                           "fig-efficiency-grid", "runtime-robust-demo", "adaptive-synthetic", "adaptive-pde"})
    EXPECT_TRUE(scenarios::is_scenario(want)) << want;
  EXPECT_EQ(n.size(), 9u);
  EXPECT_FALSE(scenarios::is_scenario("nope"));
  std::ostringstream log;
  EXPECT_THROW(scenarios::run("nope", {}, log), std::invalid_argument);
}

TEST(Scenarios, EmptySweepWritesHeaderOnly) {
  const auto out = scratch("empty");
  std::ostringstream log;
  const auto r = scenarios::run("fig-kseq-sweep", options("[sweep]\nkseq =\n", out), log);
  EXPECT_EQ(r.exit_code, scenarios::kExitOk);
  EXPECT_EQ(slurp(out / "kseq_sweep.csv"), "kseq,kseq_actual,optimum,bound_time,LeSyHom,noStScHet,StScHet\n");
  fs::remove_all(out);
}

TEST(Scenarios, LevelTableChecksPass) {
  const auto out = scratch("table");
  auto o = options("", out);
  o.check = true;
  std::ostringstream log;
  const auto r = scenarios::run("tab-level-eff", o, log);
  EXPECT_EQ(r.exit_code, scenarios::kExitOk) << log.str();
  EXPECT_FALSE(r.checks.empty());
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_TRUE(fs::exists(out / "level_table.csv"));
  EXPECT_TRUE(fs::exists(out / "lesyhom_timeline.svg"));
  fs::remove_all(out);
}

TEST(Scenarios, SameSeedSameFiles) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string ini = "[sa]\nseeds = 2\n";
  std::ostringstream log;
  auto oa = options(ini, a), ob = options(ini, b);
  oa.budget = ob.budget = 300;
  scenarios::run("sched-s0", oa, log);
  ob.jobs = 2;
  scenarios::run("sched-s0", ob, log);
  for (const char* f : {"sa_s0_seeds.csv", "sa_s0_best.json", "sa_s0_trace.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Scenarios, LevelTableRows) {
  const auto m = scenarios::reference_machine();
  const auto rows = scenarios::level_table(m, scenarios::reference_model(), scenarios::reference_counts(),
                                           scenarios::reference_efficiencies(), 520.2);
  const auto ref = scenarios::reference_level_table();
  ASSERT_EQ(rows.size(), ref.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int l = 0; l < 4; ++l) {
      EXPECT_NEAR(rows[i].time[l], ref[i].time[l], 1.0) << "theta " << i << " level " << l;
      EXPECT_NEAR(rows[i].eta[l], ref[i].eta[l], 0.02) << "theta " << i << " level " << l;
    }
}

TEST(Scenarios, ScaledCounts) {
  const auto m = scenarios::reference_machine();
  const std::vector<std::int64_t> base{1366, 228, 36, 5};
  for (double k : {0.2, 1.0, 3.4}) {
    const auto n = scenarios::scaled_counts(base, k, m);
    EXPECT_NEAR(scenarios::global_kseq(n, m), k, 0.05 * k + 0.01);
    for (auto x : n) EXPECT_GE(x, 1);
  }
}

TEST(Scenarios, EmbedSingleScale) {
  const sched::HeteroProblem p{scenarios::reference_machine(), scenarios::reference_model(),
                               scenarios::reference_counts(), {}};
  const sched::Genes flat{{1031}, {172}, {36}, {6}};
  const auto g = scenarios::embed_single_scale(flat, p);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g[0], (std::vector<std::int64_t>{1031, 0, 0, 0, 0}));
  EXPECT_EQ(g[3][0], 6);
}
