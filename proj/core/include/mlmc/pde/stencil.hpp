#pragma once

// P1 stiffness operator on the Kuhn subdivision with the four-node
// quadrature k_tau = mean of the four vertex values.
//
// On a Kuhn tetrahedron the barycentric gradients of consecutive path
// vertices are the only non-orthogonal pairs, and consecutive path vertices
// differ by one axis step. The assembled operator is therefore a 7-point
// stencil even for variable k: the weight of an axis edge is h/6 times the
// sum of k_tau over the tetrahedra whose path contains that edge (six for
// an interior edge, so k = 1 gives weight h).

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mlmc/pde/grid.hpp"

namespace mlmc::pde {

enum class Boundary {
  // u = 0 on the boundary; only interior vertices are unknowns.
  dirichlet,
  // Natural boundary conditions; every vertex is an unknown.
  neumann,
};

// Row sums of the P1 mass matrix: h^3/24 per incident tetrahedron.
std::vector<double> lumped_mass(const Grid& grid);

class StencilOperator {
 public:
  // Assembles edge weights for coefficient `coeff` (one value per vertex)
  // plus `reaction` times the lumped mass on the diagonal.
  StencilOperator(const Grid& grid, std::span<const double> coeff, Boundary bc,
                  double reaction = 0.0);

  const Grid& grid() const noexcept { return grid_; }
  Boundary boundary() const noexcept { return bc_; }
  double reaction() const noexcept { return reaction_; }
  bool is_unknown(int i, int j, int k) const {
    return bc_ == Boundary::neumann || !grid_.on_boundary(i, j, k);
  }
  std::size_t unknowns() const;

  // out = A u on unknowns, 0 on Dirichlet vertices.
  void apply(std::span<const double> u, std::span<double> out) const;
  // r = f - A u on unknowns, 0 elsewhere.
  void residual(std::span<const double> f, std::span<const double> u, std::span<double> r) const;
  // Lexicographic Gauss-Seidel sweeps (backward order when !forward).
  void gauss_seidel(std::span<const double> f, std::span<double> u, int sweeps, bool forward) const;

  // Weight of the edge from (i,j,k) to its +axis neighbour.
  double edge_weight(int axis, int i, int j, int k) const;
  double diagonal(int i, int j, int k) const { return diag_[grid_.index(i, j, k)]; }

 private:
  Grid grid_;
  Boundary bc_;
  double reaction_;
  std::array<std::vector<double>, 3> w_;  // per axis, indexed by the lower vertex
  std::vector<double> diag_;
};

// Element-by-element application of the same operator (loops over cubes
// and their six tetrahedra). Reference implementation of the stencil.
std::vector<double> apply_operator_elementwise(const Grid& grid, std::span<const double> coeff,
                                               std::span<const double> u, Boundary bc,
                                               double reaction = 0.0);

// apply_operator on unit-cube fields (homogeneous Dirichlet).
VertexField apply_operator(const VertexField& coeff, const VertexField& u);

// Euclidean norm over the unknowns of `op`.
double unknown_norm(const StencilOperator& op, std::span<const double> v);

}  // namespace mlmc::pde
