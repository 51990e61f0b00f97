#include "mlmc/pde/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlmc::pde {

Grid Grid::cube(double lo, double hi, int cells) {
  if (cells < 1 || !(hi > lo)) throw std::invalid_argument("invalid cube grid");
  Grid g;
  g.n = cells;
  g.h = (hi - lo) / cells;
  g.origin = {lo, lo, lo};
  return g;
}

Grid Grid::coarse() const {
  if (n % 2 != 0) throw std::invalid_argument("cannot coarsen a grid with odd cell count");
  Grid g = *this;
  g.n = n / 2;
  g.h = 2.0 * h;
  return g;
}

Grid Grid::refined() const {
  Grid g = *this;
  g.n = 2 * n;
  g.h = 0.5 * h;
  return g;
}

std::optional<std::array<int, 3>> Grid::vertex_at(const std::array<double, 3>& x) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double r = (x[static_cast<std::size_t>(a)] - origin[static_cast<std::size_t>(a)]) / h;
    const double ri = std::round(r);
    if (std::abs(r - ri) > 1e-9 || ri < 0 || ri > n) return std::nullopt;
    idx[static_cast<std::size_t>(a)] = static_cast<int>(ri);
  }
  return idx;
}

bool Grid::same_as(const Grid& o) const {
  return n == o.n && std::abs(h - o.h) <= 1e-14 * h && origin == o.origin;
}

GridHierarchy::GridHierarchy(int n0_, int max_level_) : n0(n0_), max_level(max_level_) {
  if (n0 < 1 || max_level < 0) throw std::invalid_argument("invalid grid hierarchy");
}

Grid GridHierarchy::unit(int level) const {
  if (level < 0 || level > max_level)
    throw std::invalid_argument("level " + std::to_string(level) + " outside hierarchy");
  return Grid::cube(0.0, 1.0, n0 << level);
}

Grid GridHierarchy::embedded(int level) const {
  if (level < 0 || level > max_level)
    throw std::invalid_argument("level " + std::to_string(level) + " outside hierarchy");
  return Grid::cube(-1.0, 2.0, 3 * (n0 << level));
}

int GridHierarchy::embedded_offset(int level) const { return n0 << level; }

std::vector<double> inject(const Grid& fine, const std::vector<double>& values) {
  if (values.size() != fine.size()) throw std::invalid_argument("inject: size mismatch");
  const Grid c = fine.coarse();
  std::vector<double> out(c.size());
  for (int k = 0; k <= c.n; ++k)
    for (int j = 0; j <= c.n; ++j)
      for (int i = 0; i <= c.n; ++i) out[c.index(i, j, k)] = values[fine.index(2 * i, 2 * j, 2 * k)];
  return out;
}

VertexField restrict_to_unit(const VertexField& embedded, const GridHierarchy& hier) {
  const Grid u = hier.unit(embedded.level);
  if (!embedded.grid.same_as(hier.embedded(embedded.level)))
    throw std::invalid_argument("field is not on the embedded grid of its level");
  const int off = hier.embedded_offset(embedded.level);
  VertexField out(u, Domain::unit, embedded.level);
  for (int k = 0; k <= u.n; ++k)
    for (int j = 0; j <= u.n; ++j)
      for (int i = 0; i <= u.n; ++i) out.at(i, j, k) = embedded.at(i + off, j + off, k + off);
  return out;
}

}  // namespace mlmc::pde
