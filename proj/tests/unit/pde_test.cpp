#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "mlmc/pde/backend.hpp"
#include "mlmc/pde/field_io.hpp"
#include "mlmc/pde/multigrid.hpp"
#include "mlmc/pde/qoi.hpp"
#include "mlmc/pde/random_field.hpp"
#include "mlmc/pde/stencil.hpp"

using namespace mlmc;
using namespace mlmc::pde;

namespace {
std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1, double hi = 1) {
  RandomStream s(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * s.uniform();
  return v;
}

std::vector<double> zero_boundary(const Grid& g, std::vector<double> v) {
  for (int k = 0; k <= g.n; ++k)
    for (int j = 0; j <= g.n; ++j)
      for (int i = 0; i <= g.n; ++i)
        if (g.on_boundary(i, j, k)) v[g.index(i, j, k)] = 0.0;
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

PdeOptions small_options(double sigma2) {
  PdeOptions o;
  o.n0 = 4;
  o.max_level = 2;
  o.covariance.sigma2 = sigma2;
  o.qoi.kind = QoiKind::flux;
  return o;
}
}  // namespace

TEST(Stencil, MatchesElementAssembly) {
  const Grid g = Grid::cube(0, 1, 6);
  const auto k = random_values(g.size(), 1, 0.2, 3.0);
  for (auto bc : {Boundary::dirichlet, Boundary::neumann}) {
    auto u = random_values(g.size(), 2);
    if (bc == Boundary::dirichlet) u = zero_boundary(g, u);
    StencilOperator op(g, k, bc, 0.5);
    std::vector<double> a(g.size());
    op.apply(u, a);
    const auto ref = apply_operator_elementwise(g, k, u, bc, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], ref[i], 1e-12 * (1 + std::abs(ref[i])));
  }
}

TEST(Stencil, SymmetricAndPositive) {
  const Grid g = Grid::cube(0, 1, 8);
  const auto k = random_values(g.size(), 3, 0.1, 5.0);
  StencilOperator op(g, k, Boundary::dirichlet);
  const auto u = zero_boundary(g, random_values(g.size(), 4)), v = zero_boundary(g, random_values(g.size(), 5));
  std::vector<double> au(g.size()), av(g.size());
  op.apply(u, au);
  op.apply(v, av);
  EXPECT_NEAR(dot(au, v), dot(u, av), 1e-12 * std::abs(dot(au, v)));
  EXPECT_GT(dot(au, u), 0.0);
}

TEST(Stencil, NeumannKillsConstants) {
  const Grid g = Grid::cube(-1, 2, 6);
  const auto k = random_values(g.size(), 6, 0.5, 2.0);
  StencilOperator op(g, k, Boundary::neumann);
  std::vector<double> one(g.size(), 1.0), out(g.size());
  op.apply(one, out);
  for (double x : out) ASSERT_NEAR(x, 0.0, 1e-12);
}

TEST(ApplyOperator, LinearInUAndK) {
  const GridHierarchy h(4, 2);
  const Grid g = h.unit(1);
  VertexField one(g, Domain::unit, 1, 1.0), three(g, Domain::unit, 1, 3.0), zero(g, Domain::unit, 1, 0.0);
  const auto z = apply_operator(one, zero);
  for (double x : z.values) EXPECT_EQ(x, 0.0);
  VertexField u(g, Domain::unit, 1);
  u.values = zero_boundary(g, random_values(g.size(), 7));
  const auto a1 = apply_operator(one, u), a3 = apply_operator(three, u);
  for (std::size_t i = 0; i < u.values.size(); ++i) EXPECT_NEAR(a3.values[i], 3 * a1.values[i], 1e-12);
  VertexField other(h.unit(2), Domain::unit, 2, 1.0);
  EXPECT_THROW(apply_operator(other, u), std::invalid_argument);
}

TEST(ApplyOperator, SecondOrderConsistency) {
  // A u_h - M f for u = sin(pi x) sin(pi y) sin(pi z), f = -Laplace u, in the discrete L2 norm.
  // (polynomials of degree two per direction are reproduced exactly)
  auto err = [](int n) {
    const Grid g = Grid::cube(0, 1, n);
    std::vector<double> u(g.size()), f(g.size());
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
          const auto x = g.position(i, j, k);
          const double v = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]) * std::sin(M_PI * x[2]);
          u[g.index(i, j, k)] = v;
          f[g.index(i, j, k)] = 3 * M_PI * M_PI * v;
        }
    const std::vector<double> k1(g.size(), 1.0);
    StencilOperator op(g, k1, Boundary::dirichlet);
    std::vector<double> r(g.size());
    const auto m = lumped_mass(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= m[i];
    op.residual(f, u, r);
    // scale by h^-3 to get point values, then discrete L2
    double s = 0;
    for (double x : r) s += x * x / std::pow(g.h, 6);
    return std::sqrt(s * std::pow(g.h, 3));
  };
  const double e8 = err(8), e16 = err(16), e32 = err(32);
  EXPECT_NEAR(std::log2(e8 / e16), 2.0, 0.3);
  EXPECT_NEAR(std::log2(e16 / e32), 2.0, 0.3);
}

TEST(Multigrid, ZeroRhsStaysZero) {
  const Grid g = Grid::cube(0, 1, 16);
  const std::vector<double> k(g.size(), 1.0), f(g.size(), 0.0);
  MultigridSolver mg(g, k, Boundary::dirichlet);
  for (auto kind : {CycleKind::fmg, CycleKind::v_cycle}) {
    CycleSpec spec;
    spec.kind = kind;
    const auto r = mg.solve(f, spec);
    for (double x : r.u) ASSERT_EQ(x, 0.0);
    EXPECT_EQ(r.final_residual, 0.0);
  }
}

TEST(Multigrid, VCycleReductionAndMonotone) {
  const Grid g = Grid::cube(0, 1, 16);
  const std::vector<double> k(g.size(), 1.0);
  const auto f = load_vector(g, 1.0);
  MultigridSolver mg(g, k, Boundary::dirichlet);
  CycleSpec spec;
  spec.kind = CycleKind::v_cycle;
  spec.rel_tol = 1e-10;
  const auto r = mg.solve(f, spec);
  ASSERT_GE(r.residual_history.size(), 4u);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    EXPECT_LT(r.residual_history[i], r.residual_history[i - 1]);
  const auto n = r.residual_history.size();
  EXPECT_LE(r.residual_history[n - 1] / r.residual_history[n - 2], 0.2);
}

TEST(Multigrid, FmgSolvesNeumannReaction) {
  const Grid g = Grid::cube(-1, 2, 12);
  const auto k = random_values(g.size(), 9, 0.5, 2.0);
  const auto f = random_values(g.size(), 10);
  MultigridSolver mg(g, k, Boundary::neumann, 25.0);
  CycleSpec spec;
  spec.kind = CycleKind::v_cycle;
  const auto r = mg.solve(f, spec);
  EXPECT_LE(r.relative_residual(), 1e-5);
}

TEST(Transfers, RestrictionIsTranspose) {
  const Grid fine = Grid::cube(0, 1, 8), coarse = fine.coarse();
  const auto uc = random_values(coarse.size(), 11), rf = random_values(fine.size(), 12);
  std::vector<double> pu(fine.size(), 0.0), rr(coarse.size(), 0.0);
  prolongate_add(coarse, uc, fine, pu);
  restrict_transpose(fine, rf, coarse, rr);
  EXPECT_NEAR(dot(pu, rf), dot(uc, rr), 1e-12 * std::abs(dot(pu, rf)));
}

TEST(Qoi, ZeroAndLinearFields) {
  const Grid g = Grid::cube(0, 1, 8);
  VertexField u(g, Domain::unit, 1), k(g, Domain::unit, 1, 1.0);
  EXPECT_EQ(point_qoi(u, {0.25, 0.25, 0.25}), 0.0);
  EXPECT_EQ(flux_qoi(u, k, 0.25), 0.0);
  for (int kk = 0; kk <= g.n; ++kk)
    for (int j = 0; j <= g.n; ++j)
      for (int i = 0; i <= g.n; ++i) u.at(i, j, kk) = g.position(i, j, kk)[1];
  EXPECT_NEAR(flux_qoi(u, k, 0.25), -1.0, 1e-12);
  EXPECT_NEAR(point_qoi(u, {0.25, 0.5, 0.75}), 0.5, 1e-15);
  EXPECT_THROW(point_qoi(u, {0.3, 0.25, 0.25}), std::invalid_argument);
}

TEST(Qoi, PointConvergesAtSecondOrder) {
  std::vector<double> q;
  for (int l = 1; l <= 3; ++l) {
    PdeOptions o = small_options(1.0);
    o.max_level = 3;
    o.qoi.kind = QoiKind::point;
    o.pde_solver.kind = CycleKind::v_cycle;
    o.pde_solver.rel_tol = 1e-10;
    const Grid g = o.hierarchy().unit(l);
    q.push_back(solve_model_problem(VertexField(g, Domain::unit, l, 1.0), o).q);
  }
  const double order = std::log2((q[1] - q[0]) / (q[2] - q[1]));
  EXPECT_NEAR(order, 2.0, 0.3);
}

TEST(WhiteNoise, ZeroScaleAndMass) {
  const Grid g = Grid::cube(-1, 2, 6);
  const auto z = sample_white_noise(g, RandomStream(1), 0.0);
  for (double x : z.values) EXPECT_EQ(x, 0.0);
  const auto m = lumped_mass(g);
  EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 27.0, 1e-12);
}

TEST(Correction, LevelZeroIsQ0) {
  const auto o = small_options(1.0);
  const auto d = pde_correction_detail(0, o, RandomStream(3));
  EXPECT_EQ(d.record.y_value, d.record.q_fine);
  EXPECT_GT(d.record.duration, 0.0);
}

TEST(Correction, DegenerateFieldGivesDeterministicDifference) {
  const auto o = small_options(1e-12);
  const auto h = o.hierarchy();
  for (int l = 1; l <= 2; ++l) {
    const double qf = solve_model_problem(VertexField(h.unit(l), Domain::unit, l, 1.0), o).q;
    const double qc = solve_model_problem(VertexField(h.unit(l - 1), Domain::unit, l - 1, 1.0), o).q;
    const auto s = pde_correction_sample(l, o, RandomStream(4));
    EXPECT_NEAR(s.y_value, qf - qc, 1e-6 * std::abs(qf - qc)) << "level " << l;
  }
}

TEST(Correction, Reproducible) {
  PdeBackend b(small_options(1.0));
  const RandomStream root(5);
  const auto a = backend_draw(b, 2, 3, root), c = backend_draw(b, 2, 3, root);
  EXPECT_EQ(a.y_value, c.y_value);
  EXPECT_EQ(a.duration, c.duration);
  EXPECT_THROW(backend_draw(b, 3, 0, root), std::invalid_argument);
}

TEST(FieldIo, RoundTrip) {
  const GridHierarchy h(4, 1);
  VertexField f(h.embedded(1), Domain::embedded, 1);
  f.values = random_values(f.values.size(), 13);
  std::stringstream ss;
  write_field(ss, f);
  const auto g = read_field(ss);
  EXPECT_EQ(g.level, 1);
  EXPECT_EQ(g.domain, Domain::embedded);
  EXPECT_TRUE(g.grid.same_as(f.grid));
  EXPECT_EQ(g.values, f.values);
  std::stringstream bad("NOTAFILE");
  EXPECT_THROW(read_field(bad), std::runtime_error);
}
