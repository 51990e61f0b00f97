#pragma once

#include <array>

#include "mlmc/pde/grid.hpp"

namespace mlmc::pde {

enum class QoiKind {
  point,  // u(x*)
  flux,   // integral of -k du/dy over the plane y = y_plane
};

struct QoiSpec {
  QoiKind kind = QoiKind::point;
  std::array<double, 3> point{0.25, 0.25, 0.25};
  double plane = 0.25;
};

// Nodal value at the QoI point; throws std::invalid_argument if the point
// is not a vertex of the grid.
double point_qoi(const VertexField& u, const std::array<double, 3>& x);

// Trapezoidal sum over the plane vertices of -k_e (u_{j+1} - u_j) / h,
// k_e the mean of the edge's end values; the plane must be a grid plane.
double flux_qoi(const VertexField& u, const VertexField& coeff, double y_plane);

double evaluate_qoi(const VertexField& u, const VertexField& coeff, const QoiSpec& spec);

}  // namespace mlmc::pde
