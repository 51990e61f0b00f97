#include "mlmc/pde/multigrid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"

namespace mlmc::pde {

void CycleSpec::validate() const {
  if (v_per_level < 1 || pre_smooth < 1 || post_smooth < 1)
    throw std::invalid_argument("cycle counts must be positive");
  if (!(rel_tol > 0.0) || max_cycles < 1) throw std::invalid_argument("invalid stopping rule");
}

void prolongate_add(const Grid& coarse, std::span<const double> uc, const Grid& fine,
                    std::span<double> uf) {
  if (fine.n != 2 * coarse.n) throw std::invalid_argument("prolongate: grids not nested");
  for (int k = 0; k <= fine.n; ++k)
    for (int j = 0; j <= fine.n; ++j)
      for (int i = 0; i <= fine.n; ++i) {
        const int I = i >> 1, J = j >> 1, K = k >> 1;
        const int si = i & 1, sj = j & 1, sk = k & 1;
        const double a = uc[coarse.index(I, J, K)];
        const double v = (si | sj | sk) ? 0.5 * (a + uc[coarse.index(I + si, J + sj, K + sk)]) : a;
        uf[fine.index(i, j, k)] += v;
      }
}

void restrict_transpose(const Grid& fine, std::span<const double> rf, const Grid& coarse,
                        std::span<double> rc) {
  if (fine.n != 2 * coarse.n) throw std::invalid_argument("restrict: grids not nested");
  std::fill(rc.begin(), rc.end(), 0.0);
  for (int k = 0; k <= fine.n; ++k)
    for (int j = 0; j <= fine.n; ++j)
      for (int i = 0; i <= fine.n; ++i) {
        const double r = rf[fine.index(i, j, k)];
        if (r == 0.0) continue;
        const int I = i >> 1, J = j >> 1, K = k >> 1;
        const int si = i & 1, sj = j & 1, sk = k & 1;
        if (si | sj | sk) {
          rc[coarse.index(I, J, K)] += 0.5 * r;
          rc[coarse.index(I + si, J + sj, K + sk)] += 0.5 * r;
        } else {
          rc[coarse.index(I, J, K)] += r;
        }
      }
}

std::vector<double> coarsen_coefficient(const Grid& fine, std::span<const double> coeff,
                                        CoefficientCoarsening how) {
  if (coeff.size() != fine.size()) throw std::invalid_argument("coefficient size mismatch");
  if (how == CoefficientCoarsening::injection)
    return inject(fine, std::vector<double>(coeff.begin(), coeff.end()));
  const Grid coarse = fine.coarse();
  const bool geo = how == CoefficientCoarsening::geometric;
  std::vector<double> src(coeff.begin(), coeff.end());
  if (geo)
    for (double& v : src) v = std::log(v);
  std::vector<double> sum(coarse.size()), ones(fine.size(), 1.0), wsum(coarse.size());
  restrict_transpose(fine, src, coarse, sum);
  restrict_transpose(fine, ones, coarse, wsum);
  for (std::size_t v = 0; v < sum.size(); ++v) {
    sum[v] /= wsum[v];
    if (geo) sum[v] = std::exp(sum[v]);
  }
  return sum;
}

struct MultigridSolver::Coarse {
  std::vector<std::size_t> unknowns;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

MultigridSolver::~MultigridSolver() = default;
MultigridSolver::MultigridSolver(MultigridSolver&&) noexcept = default;
MultigridSolver& MultigridSolver::operator=(MultigridSolver&&) noexcept = default;

MultigridSolver::MultigridSolver(const Grid& fine, std::span<const double> coeff, Boundary bc,
                                 double reaction, int min_coarse_cells,
                                 CoefficientCoarsening how) {
  if (coeff.size() != fine.size()) throw std::invalid_argument("coefficient size mismatch");
  std::vector<Grid> grids{fine};
  std::vector<std::vector<double>> coeffs{std::vector<double>(coeff.begin(), coeff.end())};
  while (grids.back().n % 2 == 0 && grids.back().n / 2 >= std::max(1, min_coarse_cells)) {
    coeffs.push_back(coarsen_coefficient(grids.back(), coeffs.back(), how));
    grids.push_back(grids.back().coarse());
  }
  for (std::size_t m = grids.size(); m-- > 0;) ops_.emplace_back(grids[m], coeffs[m], bc, reaction);

  // Dense Cholesky of the coarsest operator.
  const StencilOperator& c = ops_.front();
  const Grid& g = c.grid();
  coarse_ = std::make_unique<Coarse>();
  for (int k = 0; k <= g.n; ++k)
    for (int j = 0; j <= g.n; ++j)
      for (int i = 0; i <= g.n; ++i)
        if (c.is_unknown(i, j, k)) coarse_->unknowns.push_back(g.index(i, j, k));
  const auto nu = coarse_->unknowns.size();
  if (nu == 0) throw std::invalid_argument("coarsest grid has no unknowns");
  if (nu > 20000) throw std::invalid_argument("coarsest grid too large for a dense solve");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
  std::vector<double> e(g.size(), 0.0), col(g.size(), 0.0);
  for (std::size_t a = 0; a < nu; ++a) {
    e[coarse_->unknowns[a]] = 1.0;
    c.apply(e, col);
    e[coarse_->unknowns[a]] = 0.0;
    for (std::size_t b = 0; b < nu; ++b)
      A(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = col[coarse_->unknowns[b]];
  }
  coarse_->llt.compute(A);
  if (coarse_->llt.info() != Eigen::Success)
    throw SampleFailed("coarse operator is not positive definite",
                       "coarsest grid n=" + std::to_string(g.n));
}

void MultigridSolver::coarse_solve(std::span<const double> f, std::span<double> u) const {
  const auto nu = coarse_->unknowns.size();
  Eigen::VectorXd b(static_cast<Eigen::Index>(nu));
  for (std::size_t a = 0; a < nu; ++a) b(static_cast<Eigen::Index>(a)) = f[coarse_->unknowns[a]];
  const Eigen::VectorXd x = coarse_->llt.solve(b);
  std::fill(u.begin(), u.end(), 0.0);
  for (std::size_t a = 0; a < nu; ++a) u[coarse_->unknowns[a]] = x(static_cast<Eigen::Index>(a));
}

void MultigridSolver::v_cycle(int m, std::span<const double> f, std::span<double> u,
                              const CycleSpec& spec, std::uint64_t& work) const {
  if (m == 0) {
    coarse_solve(f, u);
    work += ops_.front().unknowns();
    return;
  }
  const StencilOperator& A = ops_[static_cast<std::size_t>(m)];
  const StencilOperator& Ac = ops_[static_cast<std::size_t>(m - 1)];
  const Grid& g = A.grid();
  const Grid& gc = Ac.grid();
  A.gauss_seidel(f, u, spec.pre_smooth, true);
  std::vector<double> r(g.size());
  A.residual(f, u, r);
  std::vector<double> rc(gc.size()), ec(gc.size(), 0.0);
  restrict_transpose(g, r, gc, rc);
  work += static_cast<std::uint64_t>(spec.pre_smooth + spec.post_smooth + 2) * A.unknowns();
  v_cycle(m - 1, rc, ec, spec, work);
  if (A.boundary() == Boundary::dirichlet)
    for (int k = 0; k <= gc.n; ++k)
      for (int j = 0; j <= gc.n; ++j)
        for (int i = 0; i <= gc.n; ++i)
          if (gc.on_boundary(i, j, k)) ec[gc.index(i, j, k)] = 0.0;
  prolongate_add(gc, ec, g, u);
  A.gauss_seidel(f, u, spec.post_smooth, false);
}

double MultigridSolver::residual_norm(std::span<const double> rhs, std::span<const double> u) const {
  std::vector<double> r(u.size());
  fine_op().residual(rhs, u, r);
  return unknown_norm(fine_op(), r);
}

SolveResult MultigridSolver::v_cycles(std::span<const double> rhs, std::vector<double> u0,
                                      const CycleSpec& spec) const {
  spec.validate();
  const StencilOperator& A = fine_op();
  if (rhs.size() != A.grid().size() || u0.size() != A.grid().size())
    throw std::invalid_argument("right-hand side size mismatch");
  SolveResult res;
  res.u = std::move(u0);
  res.initial_residual = residual_norm(rhs, res.u);
  res.final_residual = res.initial_residual;
  res.residual_history.push_back(res.initial_residual);
  if (res.initial_residual == 0.0) return res;
  int growth = 0;
  const int top = levels() - 1;
  while (res.cycles < spec.max_cycles && res.final_residual > spec.rel_tol * res.initial_residual) {
    v_cycle(top, rhs, res.u, spec, res.work_units);
    ++res.cycles;
    const double r = residual_norm(rhs, res.u);
    res.work_units += A.unknowns();
    growth = r > res.final_residual ? growth + 1 : 0;
    res.final_residual = r;
    res.residual_history.push_back(r);
    if (!std::isfinite(r) || growth >= 3)
      throw SampleFailed("multigrid diverged",
                         "residual " + std::to_string(r) + " after " + std::to_string(res.cycles) +
                             " cycles (initial " + std::to_string(res.initial_residual) + ")");
  }
  return res;
}

SolveResult MultigridSolver::solve(std::span<const double> rhs, const CycleSpec& spec) const {
  spec.validate();
  const auto& A = fine_op();
  if (rhs.size() != A.grid().size()) throw std::invalid_argument("right-hand side size mismatch");
  if (spec.kind == CycleKind::v_cycle)
    return v_cycles(rhs, std::vector<double>(rhs.size(), 0.0), spec);

  // Nested iteration: right-hand sides on every grid, exact solve on the
  // coarsest, then interpolate and run v_per_level V-cycles per level.
  const int top = levels() - 1;
  std::vector<std::vector<double>> f(static_cast<std::size_t>(levels()));
  f[static_cast<std::size_t>(top)].assign(rhs.begin(), rhs.end());
  SolveResult res;
  for (int m = top; m > 0; --m) {
    const Grid& g = ops_[static_cast<std::size_t>(m)].grid();
    const Grid& gc = ops_[static_cast<std::size_t>(m - 1)].grid();
    f[static_cast<std::size_t>(m - 1)].assign(gc.size(), 0.0);
    restrict_transpose(g, f[static_cast<std::size_t>(m)], gc, f[static_cast<std::size_t>(m - 1)]);
    res.work_units += ops_[static_cast<std::size_t>(m)].unknowns();
  }
  std::vector<double> u(ops_.front().grid().size(), 0.0);
  coarse_solve(f.front(), u);
  for (int m = 1; m <= top; ++m) {
    const StencilOperator& Am = ops_[static_cast<std::size_t>(m)];
    const Grid& gc = ops_[static_cast<std::size_t>(m - 1)].grid();
    if (Am.boundary() == Boundary::dirichlet)
      for (int k = 0; k <= gc.n; ++k)
        for (int j = 0; j <= gc.n; ++j)
          for (int i = 0; i <= gc.n; ++i)
            if (gc.on_boundary(i, j, k)) u[gc.index(i, j, k)] = 0.0;
    std::vector<double> uf(Am.grid().size(), 0.0);
    prolongate_add(gc, u, Am.grid(), uf);
    u = std::move(uf);
    if (m == top) res.fine_start_residual = residual_norm(rhs, u);
    for (int c = 0; c < spec.v_per_level; ++c) v_cycle(m, f[static_cast<std::size_t>(m)], u, spec, res.work_units);
  }
  res.cycles = spec.v_per_level;
  res.initial_residual = unknown_norm(A, rhs);
  res.final_residual = residual_norm(rhs, u);
  res.residual_history = {res.initial_residual, res.final_residual};
  res.u = std::move(u);
  return res;
}

}  // namespace mlmc::pde
