#pragma once

// Lognormal coefficients from the Whittle SPDE (kappa^2 - Laplace) Z = W,
// solved with P1 elements and homogeneous Neumann conditions on the
// enlarged box (-1,2)^3, then restricted to the unit cube.
//
// In three dimensions the solution has covariance
//   exp(-kappa r) / (8 pi kappa),
// so kappa = 1/lambda gives correlation length lambda and rescaling by
// sigma sqrt(8 pi kappa) gives variance sigma^2.

#include "mlmc/pde/grid.hpp"
#include "mlmc/pde/multigrid.hpp"
#include "mlmc/random.hpp"

namespace mlmc::pde {

struct CovarianceParams {
  double sigma2 = 1.0;
  double lambda = 0.2;

  double kappa() const { return 1.0 / lambda; }
  // Variance of the unscaled SPDE solution, (8 pi kappa)^-1.
  double native_variance() const;
  void validate() const;
};

// Load vector b_j = sqrt(m_j) z_j, z_j iid N(0,1), m_j the lumped mass.
// `scale` multiplies every entry (0 gives the zero field).
VertexField sample_white_noise(const Grid& grid, RandomStream stream, double scale = 1.0);

struct GaussianFieldSample {
  VertexField z;            // rescaled Gaussian field on the unit cube
  SolveResult solve;        // SPDE solve statistics (u omitted)
};

// Gaussian field with the target covariance on the unit cube at `level`.
// Throws SampleFailed if the SPDE solve diverges.
GaussianFieldSample sample_gaussian_field(const GridHierarchy& hier, int level,
                                          const CovarianceParams& params, RandomStream stream,
                                          const CycleSpec& spec = {});

// exp of sample_gaussian_field.
VertexField sample_log_coefficient(const GridHierarchy& hier, int level,
                                   const CovarianceParams& params, RandomStream stream,
                                   const CycleSpec& spec = {});

}  // namespace mlmc::pde
