// Invariants of the discretization and the random field sampler.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mlmc/pde/backend.hpp"
#include "mlmc/pde/random_field.hpp"
#include "mlmc/pde/stencil.hpp"

using namespace mlmc;
using namespace mlmc::pde;

TEST(PdeProperties, NeumannReducesToDirichletInside) {
  // For u vanishing on the boundary both operators agree at interior rows.
  const RandomStream root(201);
  for (int trial = 0; trial < 20; ++trial) {
    RandomStream rs = root.split(trial);
    const int n = 2 * static_cast<int>(rs.uniform_int(2, 6));
    const Grid g = Grid::cube(0, 1, n);
    std::vector<double> k(g.size()), u(g.size());
    for (auto& x : k) x = std::exp(rs.normal());
    for (int kk = 0; kk <= n; ++kk)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) u[g.index(i, j, kk)] = g.on_boundary(i, j, kk) ? 0.0 : rs.normal();
    StencilOperator dir(g, k, Boundary::dirichlet), neu(g, k, Boundary::neumann);
    std::vector<double> a(g.size()), b(g.size());
    dir.apply(u, a);
    neu.apply(u, b);
    for (int kk = 1; kk < n; ++kk)
      for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
          const auto id = g.index(i, j, kk);
          ASSERT_NEAR(a[id], b[id], 1e-12 * (1 + std::abs(a[id])));
        }
  }
}

TEST(PdeProperties, MonotoneInCoefficient) {
  // A larger coefficient stiffens the problem: the point value drops.
  PdeOptions o;
  o.max_level = 1;
  o.qoi.kind = QoiKind::point;
  o.pde_solver.kind = CycleKind::v_cycle;
  o.pde_solver.rel_tol = 1e-10;
  const Grid g = o.hierarchy().unit(1);
  double prev = INFINITY;
  for (double c : {0.5, 1.0, 2.0, 4.0}) {
    const double q = solve_model_problem(VertexField(g, Domain::unit, 1, c), o).q;
    EXPECT_LT(q, prev);
    EXPECT_NEAR(q * c, solve_model_problem(VertexField(g, Domain::unit, 1, 1.0), o).q, 1e-8);
    prev = q;
  }
}

TEST(PdeProperties, FieldIsStationary) {
  // Pointwise variance at a corner, an edge midpoint and the centre of the
  // unit cube agree; the enlarged sampling box removes boundary inflation.
  const GridHierarchy h(4, 1);
  const CovarianceParams cov{1.0, 0.2};
  const Grid g = h.unit(1);
  const std::array<std::array<int, 3>, 3> probes{{{0, 0, 0}, {4, 0, 0}, {4, 4, 4}}};
  std::array<double, 3> s2{};
  constexpr int n = 300;
  const RandomStream root(202);
  for (int i = 0; i < n; ++i) {
    const auto f = sample_gaussian_field(h, 1, cov, root.split(i));
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double z = f.z.values[g.index(probes[p][0], probes[p][1], probes[p][2])];
      s2[p] += z * z / n;
    }
  }
  for (std::size_t p = 0; p < probes.size(); ++p) EXPECT_NEAR(s2[p], 1.0, 0.25) << "probe " << p;
  EXPECT_NEAR(s2[0] / s2[2], 1.0, 0.3);
}
