#include "mlmc/pde/qoi.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmc::pde {

double point_qoi(const VertexField& u, const std::array<double, 3>& x) {
  const auto v = u.grid.vertex_at(x);
  if (!v) throw std::invalid_argument("QoI point is not a grid vertex");
  return u.at((*v)[0], (*v)[1], (*v)[2]);
}

double flux_qoi(const VertexField& u, const VertexField& coeff, double y_plane) {
  if (!u.grid.same_as(coeff.grid)) throw std::invalid_argument("flux_qoi: grid mismatch");
  const Grid& g = u.grid;
  const double r = (y_plane - g.origin[1]) / g.h;
  const double rj = std::round(r);
  if (std::abs(r - rj) > 1e-9 || rj < 0 || rj >= g.n)
    throw std::invalid_argument("flux plane is not an interior grid plane");
  const int j0 = static_cast<int>(rj);
  double sum = 0.0;
  for (int k = 0; k <= g.n; ++k)
    for (int i = 0; i <= g.n; ++i) {
      const double w = (i == 0 || i == g.n ? 0.5 : 1.0) * (k == 0 || k == g.n ? 0.5 : 1.0);
      const double ke = 0.5 * (coeff.at(i, j0, k) + coeff.at(i, j0 + 1, k));
      sum += w * -ke * (u.at(i, j0 + 1, k) - u.at(i, j0, k)) / g.h;
    }
  return sum * g.h * g.h;
}

double evaluate_qoi(const VertexField& u, const VertexField& coeff, const QoiSpec& spec) {
  return spec.kind == QoiKind::point ? point_qoi(u, spec.point) : flux_qoi(u, coeff, spec.plane);
}

}  // namespace mlmc::pde
