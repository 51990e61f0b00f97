#pragma once

// Geometric multigrid on nested Kuhn grids: lexicographic Gauss-Seidel
// (forward before, backward after the coarse correction), linear
// interpolation along Kuhn edges and its transpose, re-discretized coarse
// operators and a dense Cholesky solve on the coarsest grid.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mlmc/pde/stencil.hpp"

namespace mlmc::pde {

enum class CycleKind { v_cycle, fmg };

struct CycleSpec {
  CycleKind kind = CycleKind::fmg;
  int v_per_level = 2;  // V-cycles per new level in FMG
  int pre_smooth = 4;
  int post_smooth = 4;
  // V-cycle mode: stop at ||r|| <= rel_tol ||r_0||.
  double rel_tol = 1e-5;
  int max_cycles = 60;

  void validate() const;
};

struct SolveResult {
  std::vector<double> u;
  // ||r|| after the initial guess and after every cycle (V mode) or after
  // the full FMG (FMG mode).
  std::vector<double> residual_history;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  // FMG only: residual of the interpolated start on the finest grid.
  double fine_start_residual = 0.0;
  int cycles = 0;
  // Vertex updates performed (smoothing, residuals, transfers), all grids.
  std::uint64_t work_units = 0;

  double relative_residual() const {
    return initial_residual > 0.0 ? final_residual / initial_residual : 0.0;
  }
};

// Fine vertex 2I + s takes (u[I] + u[I+s]) / 2 (u[I] for s = 0).
void prolongate_add(const Grid& coarse, std::span<const double> uc, const Grid& fine,
                    std::span<double> uf);
// Transpose of the prolongation.
void restrict_transpose(const Grid& fine, std::span<const double> rf, const Grid& coarse,
                        std::span<double> rc);

// How coarse-grid coefficients are obtained from the next finer grid.
enum class CoefficientCoarsening {
  injection,   // value at the coincident fine vertex
  arithmetic,  // full-weighting average
  geometric,   // full-weighting average of log k
};

// Coarse-grid vertex coefficients for `fine`.
std::vector<double> coarsen_coefficient(const Grid& fine, std::span<const double> coeff,
                                        CoefficientCoarsening how);

class MultigridSolver {
 public:
  // Builds the hierarchy down to the coarsest grid with at least
  // `min_coarse_cells` cells per axis that can no longer be halved (or
  // would drop below the minimum). Coarse coefficients are the fine vertex
  // values at coarse vertices unless `how` says otherwise.
  MultigridSolver(const Grid& fine, std::span<const double> coeff, Boundary bc,
                  double reaction = 0.0, int min_coarse_cells = 2,
                  CoefficientCoarsening how = CoefficientCoarsening::injection);
  ~MultigridSolver();
  MultigridSolver(MultigridSolver&&) noexcept;
  MultigridSolver& operator=(MultigridSolver&&) noexcept;

  int levels() const { return static_cast<int>(ops_.size()); }
  // Operator on hierarchy level m (0 = coarsest).
  const StencilOperator& op(int m) const { return ops_.at(static_cast<std::size_t>(m)); }
  const StencilOperator& fine_op() const { return ops_.back(); }

  SolveResult solve(std::span<const double> rhs, const CycleSpec& spec) const;
  // V-cycles from `u0` until the tolerance or max_cycles. Throws
  // SampleFailed if the residual grows over three consecutive cycles.
  SolveResult v_cycles(std::span<const double> rhs, std::vector<double> u0,
                       const CycleSpec& spec) const;

  double residual_norm(std::span<const double> rhs, std::span<const double> u) const;

 private:
  struct Coarse;
  void v_cycle(int m, std::span<const double> f, std::span<double> u, const CycleSpec& spec,
               std::uint64_t& work) const;
  void coarse_solve(std::span<const double> f, std::span<double> u) const;

  std::vector<StencilOperator> ops_;
  std::unique_ptr<Coarse> coarse_;
};

}  // namespace mlmc::pde
