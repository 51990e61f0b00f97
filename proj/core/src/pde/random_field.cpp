#include "mlmc/pde/random_field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/pde/stencil.hpp"

namespace mlmc::pde {

double CovarianceParams::native_variance() const {
  return 1.0 / (8.0 * std::numbers::pi * kappa());
}

void CovarianceParams::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be > 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be > 0");
}

VertexField sample_white_noise(const Grid& grid, RandomStream stream, double scale) {
  VertexField b(grid, Domain::embedded, 0);
  if (scale == 0.0) return b;
  const auto m = lumped_mass(grid);
  for (std::size_t j = 0; j < m.size(); ++j) b.values[j] = scale * std::sqrt(m[j]) * stream.normal();
  return b;
}

GaussianFieldSample sample_gaussian_field(const GridHierarchy& hier, int level,
                                          const CovarianceParams& params, RandomStream stream,
                                          const CycleSpec& spec) {
  params.validate();
  const Grid big = hier.embedded(level);
  VertexField w = sample_white_noise(big, stream);
  w.level = level;
  const std::vector<double> ones(big.size(), 1.0);
  const double kappa = params.kappa();
  MultigridSolver mg(big, ones, Boundary::neumann, kappa * kappa, 2);
  GaussianFieldSample out;
  out.solve = mg.solve(w.values, spec);
  if (!std::isfinite(out.solve.final_residual))
    throw SampleFailed("SPDE solve produced a non-finite residual", "level " + std::to_string(level));

  VertexField zbig(big, Domain::embedded, level);
  const double scale = std::sqrt(params.sigma2 / params.native_variance());
  for (std::size_t j = 0; j < zbig.values.size(); ++j) zbig.values[j] = scale * out.solve.u[j];
  out.solve.u.clear();
  out.z = restrict_to_unit(zbig, hier);
  return out;
}

VertexField sample_log_coefficient(const GridHierarchy& hier, int level,
                                   const CovarianceParams& params, RandomStream stream,
                                   const CycleSpec& spec) {
  VertexField k = sample_gaussian_field(hier, level, params, stream, spec).z;
  for (double& v : k.values) v = std::exp(v);
  return k;
}

}  // namespace mlmc::pde
