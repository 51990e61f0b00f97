#pragma once

// Structured vertex grids on axis-aligned cubes. Every cube is split into
// six Kuhn tetrahedra (one per axis permutation, all sharing the main
// diagonal), so refinement by two keeps old vertices and old edges.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace mlmc::pde {

struct Grid {
  int n = 1;          // cells per axis
  double h = 1.0;     // mesh width
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  static Grid cube(double lo, double hi, int cells);

  int nv1() const { return n + 1; }
  std::size_t size() const {
    const auto m = static_cast<std::size_t>(n + 1);
    return m * m * m;
  }
  std::size_t index(int i, int j, int k) const {
    const auto m = static_cast<std::size_t>(n + 1);
    return (static_cast<std::size_t>(k) * m + static_cast<std::size_t>(j)) * m +
           static_cast<std::size_t>(i);
  }
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n || j == n || k == n;
  }
  std::array<double, 3> position(int i, int j, int k) const {
    return {origin[0] + i * h, origin[1] + j * h, origin[2] + k * h};
  }
  // Grid with half the cells over the same cube; n must be even.
  Grid coarse() const;
  Grid refined() const;
  // Vertex at `x` if `x` is (up to round-off) a grid vertex.
  std::optional<std::array<int, 3>> vertex_at(const std::array<double, 3>& x) const;
  bool same_as(const Grid& o) const;
};

enum class Domain { unit, embedded };

struct VertexField {
  Grid grid;
  Domain domain = Domain::unit;
  int level = 0;
  std::vector<double> values;

  VertexField() = default;
  VertexField(Grid g, Domain d, int lvl, double fill = 0.0)
      : grid(g), domain(d), level(lvl), values(g.size(), fill) {}
  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

// Level l: D = (0,1)^3 with n0 2^l cells per axis; the sampling domain
// D~ = (-1,2)^3 uses the same mesh width (3 n0 2^l cells).
struct GridHierarchy {
  int n0 = 4;
  int max_level = 3;

  GridHierarchy() = default;
  GridHierarchy(int n0_, int max_level_);

  Grid unit(int level) const;
  Grid embedded(int level) const;
  // Offset of D's origin vertex inside the embedded grid of the same level.
  int embedded_offset(int level) const;
};

// Values of a fine field at the vertices of the grid with half the cells.
std::vector<double> inject(const Grid& fine, const std::vector<double>& values);

// Restriction of an embedded-domain field to the unit cube vertices.
VertexField restrict_to_unit(const VertexField& embedded, const GridHierarchy& hier);

}  // namespace mlmc::pde
