#pragma once

// Elliptic model problem -div(k grad u) = f on (0,1)^3, u = 0 on the
// boundary, with a lognormal k. A correction sample draws one field on the
// fine level, injects it to the next coarser level and solves on both.

#include <cstdint>

#include "mlmc/pde/grid.hpp"
#include "mlmc/pde/multigrid.hpp"
#include "mlmc/pde/qoi.hpp"
#include "mlmc/pde/random_field.hpp"
#include "mlmc/samplers.hpp"

namespace mlmc::pde {

struct PdeOptions {
  int n0 = 4;
  int max_level = 3;
  CovarianceParams covariance;
  QoiSpec qoi;
  double source = 1.0;          // constant right-hand side f
  CycleSpec field_solver;       // SPDE solve
  CycleSpec pde_solver;         // elliptic solves
  // Coefficients on the multigrid hierarchy of each elliptic solve.
  CoefficientCoarsening coarsening = CoefficientCoarsening::geometric;
  // Modeled seconds per vertex update; durations are work * this.
  double seconds_per_update = 1e-8;

  GridHierarchy hierarchy() const { return {n0, max_level}; }
  void validate() const;
};

// Load vector of f on the unit-cube grid (lumped mass times f, zero on
// the boundary).
std::vector<double> load_vector(const Grid& grid, double f);

struct PdeSolve {
  VertexField u;
  double q = 0.0;
  SolveResult stats;
};

// Solves the model problem for a coefficient on one unit-cube grid.
PdeSolve solve_model_problem(const VertexField& coeff, const PdeOptions& opt);

struct CorrectionDetail {
  SampleRecord record;
  double q_coarse = 0.0;
  double fine_residual = 0.0;
  double coarse_residual = 0.0;
  double field_residual = 0.0;
  std::uint64_t work_units = 0;
};

// Y_l = Q_l - Q_{l-1} from one field sample (Y_0 = Q_0). `stream` is the
// sample's stream; the field uses stream.split(kPurposeField).
CorrectionDetail pde_correction_detail(int level, const PdeOptions& opt, RandomStream stream);
SampleRecord pde_correction_sample(int level, const PdeOptions& opt, RandomStream stream);

class PdeBackend final : public SampleBackend {
 public:
  explicit PdeBackend(PdeOptions opt);

  int max_level() const override { return opt_.max_level; }
  std::string name() const override { return "pde"; }
  SampleRecord draw(int level, std::int64_t index, const RandomStream& root) const override;

  const PdeOptions& options() const noexcept { return opt_; }

 private:
  PdeOptions opt_;
};

}  // namespace mlmc::pde
