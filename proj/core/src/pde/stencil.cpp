#include "mlmc/pde/stencil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mlmc::pde {
namespace {

constexpr std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

// Corner bitmasks (bit a = +1 along axis a) of the Kuhn path for a permutation.
std::array<int, 4> path_corners(const std::array<int, 3>& p) {
  return {0, 1 << p[0], (1 << p[0]) | (1 << p[1]), 7};
}

template <class Fn>
void for_each_tet(const Grid& g, std::span<const double> coeff, Fn&& fn) {
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        std::array<std::size_t, 8> v{};
        std::array<double, 8> c{};
        for (int s = 0; s < 8; ++s) {
          v[static_cast<std::size_t>(s)] = g.index(i + (s & 1), j + ((s >> 1) & 1), k + ((s >> 2) & 1));
          c[static_cast<std::size_t>(s)] = coeff.empty() ? 1.0 : coeff[v[static_cast<std::size_t>(s)]];
        }
        for (const auto& p : kPerms) {
          const auto pc = path_corners(p);
          const double kavg = 0.25 * (c[static_cast<std::size_t>(pc[0])] + c[static_cast<std::size_t>(pc[1])] +
                                      c[static_cast<std::size_t>(pc[2])] + c[static_cast<std::size_t>(pc[3])]);
          std::array<std::size_t, 4> tv{v[static_cast<std::size_t>(pc[0])], v[static_cast<std::size_t>(pc[1])],
                                        v[static_cast<std::size_t>(pc[2])], v[static_cast<std::size_t>(pc[3])]};
          fn(p, tv, kavg);
        }
      }
}

}  // namespace

std::vector<double> lumped_mass(const Grid& g) {
  std::vector<double> m(g.size(), 0.0);
  const double share = g.h * g.h * g.h / 24.0;
  for_each_tet(g, {}, [&](const auto&, const auto& tv, double) {
    for (auto v : tv) m[v] += share;
  });
  return m;
}

StencilOperator::StencilOperator(const Grid& grid, std::span<const double> coeff, Boundary bc,
                                 double reaction)
    : grid_(grid), bc_(bc), reaction_(reaction) {
  if (coeff.size() != grid.size()) throw std::invalid_argument("coefficient size mismatch");
  if (reaction < 0.0) throw std::invalid_argument("reaction must be >= 0");
  for (auto& w : w_) w.assign(grid.size(), 0.0);
  const double scale = grid.h / 6.0;
  for_each_tet(grid, coeff, [&](const std::array<int, 3>& p, const std::array<std::size_t, 4>& tv,
                                double kavg) {
    for (int e = 0; e < 3; ++e)
      w_[static_cast<std::size_t>(p[static_cast<std::size_t>(e)])][tv[static_cast<std::size_t>(e)]] +=
          kavg * scale;
  });
  diag_.assign(grid.size(), 0.0);
  if (reaction > 0.0) {
    const auto m = lumped_mass(grid);
    for (std::size_t v = 0; v < m.size(); ++v) diag_[v] = reaction * m[v];
  }
  const int n = grid.n;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const auto v = grid.index(i, j, k);
        double d = 0.0;
        if (i < n) d += w_[0][v];
        if (i > 0) d += w_[0][grid.index(i - 1, j, k)];
        if (j < n) d += w_[1][v];
        if (j > 0) d += w_[1][grid.index(i, j - 1, k)];
        if (k < n) d += w_[2][v];
        if (k > 0) d += w_[2][grid.index(i, j, k - 1)];
        diag_[v] += d;
      }
}

std::size_t StencilOperator::unknowns() const {
  if (bc_ == Boundary::neumann) return grid_.size();
  const auto m = static_cast<std::size_t>(std::max(0, grid_.n - 1));
  return m * m * m;
}

double StencilOperator::edge_weight(int axis, int i, int j, int k) const {
  return w_.at(static_cast<std::size_t>(axis))[grid_.index(i, j, k)];
}

void StencilOperator::apply(std::span<const double> u, std::span<double> out) const {
  const int n = grid_.n;
  const std::size_t sx = 1, sy = static_cast<std::size_t>(n + 1), sz = sy * sy;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const auto v = grid_.index(i, j, k);
        if (!is_unknown(i, j, k)) {
          out[v] = 0.0;
          continue;
        }
        double s = diag_[v] * u[v];
        if (i < n) s -= w_[0][v] * u[v + sx];
        if (i > 0) s -= w_[0][v - sx] * u[v - sx];
        if (j < n) s -= w_[1][v] * u[v + sy];
        if (j > 0) s -= w_[1][v - sy] * u[v - sy];
        if (k < n) s -= w_[2][v] * u[v + sz];
        if (k > 0) s -= w_[2][v - sz] * u[v - sz];
        out[v] = s;
      }
}

void StencilOperator::residual(std::span<const double> f, std::span<const double> u,
                               std::span<double> r) const {
  apply(u, r);
  const int n = grid_.n;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const auto v = grid_.index(i, j, k);
        r[v] = is_unknown(i, j, k) ? f[v] - r[v] : 0.0;
      }
}

void StencilOperator::gauss_seidel(std::span<const double> f, std::span<double> u, int sweeps,
                                   bool forward) const {
  const int n = grid_.n;
  const int lo = bc_ == Boundary::dirichlet ? 1 : 0;
  const int hi = bc_ == Boundary::dirichlet ? n - 1 : n;
  const std::size_t sx = 1, sy = static_cast<std::size_t>(n + 1), sz = sy * sy;
  auto relax = [&](int i, int j, int k) {
    const auto v = grid_.index(i, j, k);
    double s = f[v];
    if (i < n) s += w_[0][v] * u[v + sx];
    if (i > 0) s += w_[0][v - sx] * u[v - sx];
    if (j < n) s += w_[1][v] * u[v + sy];
    if (j > 0) s += w_[1][v - sy] * u[v - sy];
    if (k < n) s += w_[2][v] * u[v + sz];
    if (k > 0) s += w_[2][v - sz] * u[v - sz];
    u[v] = s / diag_[v];
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    if (forward) {
      for (int k = lo; k <= hi; ++k)
        for (int j = lo; j <= hi; ++j)
          for (int i = lo; i <= hi; ++i) relax(i, j, k);
    } else {
      for (int k = hi; k >= lo; --k)
        for (int j = hi; j >= lo; --j)
          for (int i = hi; i >= lo; --i) relax(i, j, k);
    }
  }
}

std::vector<double> apply_operator_elementwise(const Grid& grid, std::span<const double> coeff,
                                               std::span<const double> u, Boundary bc,
                                               double reaction) {
  if (coeff.size() != grid.size() || u.size() != grid.size())
    throw std::invalid_argument("apply_operator: level mismatch");
  std::vector<double> out(grid.size(), 0.0);
  const double scale = grid.h / 6.0;
  for_each_tet(grid, coeff, [&](const auto&, const std::array<std::size_t, 4>& tv, double kavg) {
    // Local stiffness: -k h/6 between consecutive path vertices.
    for (int e = 0; e < 3; ++e) {
      const auto a = tv[static_cast<std::size_t>(e)], b = tv[static_cast<std::size_t>(e + 1)];
      const double flux = kavg * scale * (u[a] - u[b]);
      out[a] += flux;
      out[b] -= flux;
    }
  });
  if (reaction > 0.0) {
    const auto m = lumped_mass(grid);
    for (std::size_t v = 0; v < out.size(); ++v) out[v] += reaction * m[v] * u[v];
  }
  if (bc == Boundary::dirichlet)
    for (int k = 0; k <= grid.n; ++k)
      for (int j = 0; j <= grid.n; ++j)
        for (int i = 0; i <= grid.n; ++i)
          if (grid.on_boundary(i, j, k)) out[grid.index(i, j, k)] = 0.0;
  return out;
}

VertexField apply_operator(const VertexField& coeff, const VertexField& u) {
  if (coeff.level != u.level || !coeff.grid.same_as(u.grid))
    throw std::invalid_argument("apply_operator: level mismatch");
  VertexField out(u.grid, u.domain, u.level);
  // Dirichlet data is homogeneous: boundary values of u do not enter.
  std::vector<double> masked = u.values;
  for (int k = 0; k <= u.grid.n; ++k)
    for (int j = 0; j <= u.grid.n; ++j)
      for (int i = 0; i <= u.grid.n; ++i)
        if (u.grid.on_boundary(i, j, k)) masked[u.grid.index(i, j, k)] = 0.0;
  out.values = apply_operator_elementwise(u.grid, coeff.values, masked, Boundary::dirichlet);
  return out;
}

double unknown_norm(const StencilOperator& op, std::span<const double> v) {
  const Grid& g = op.grid();
  double s = 0.0;
  for (int k = 0; k <= g.n; ++k)
    for (int j = 0; j <= g.n; ++j)
      for (int i = 0; i <= g.n; ++i)
        if (op.is_unknown(i, j, k)) {
          const double x = v[g.index(i, j, k)];
          s += x * x;
        }
  return std::sqrt(s);
}

}  // namespace mlmc::pde
