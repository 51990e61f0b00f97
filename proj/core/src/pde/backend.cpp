#include "mlmc/pde/backend.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mlmc/pde/stencil.hpp"

namespace mlmc::pde {

void PdeOptions::validate() const {
  if (n0 < 2 || n0 % 2 != 0) throw std::invalid_argument("n0 must be even and >= 2");
  if (max_level < 0 || max_level > 6) throw std::invalid_argument("max_level must be in [0, 6]");
  covariance.validate();
  field_solver.validate();
  pde_solver.validate();
  if (!(seconds_per_update > 0.0)) throw std::invalid_argument("seconds_per_update must be > 0");
  // The QoI point/plane must be a vertex on the coarsest grid.
  const Grid g0 = hierarchy().unit(0);
  if (qoi.kind == QoiKind::point && !g0.vertex_at(qoi.point))
    throw std::invalid_argument("QoI point is not a vertex of the level-0 grid");
  if (qoi.kind == QoiKind::flux && !g0.vertex_at({0.0, qoi.plane, 0.0}))
    throw std::invalid_argument("flux plane is not a plane of the level-0 grid");
}

std::vector<double> load_vector(const Grid& grid, double f) {
  auto b = lumped_mass(grid);
  for (int k = 0; k <= grid.n; ++k)
    for (int j = 0; j <= grid.n; ++j)
      for (int i = 0; i <= grid.n; ++i) {
        auto& v = b[grid.index(i, j, k)];
        v = grid.on_boundary(i, j, k) ? 0.0 : f * v;
      }
  return b;
}

PdeSolve solve_model_problem(const VertexField& coeff, const PdeOptions& opt) {
  const Grid& g = coeff.grid;
  MultigridSolver mg(g, coeff.values, Boundary::dirichlet, 0.0, 2, opt.coarsening);
  const auto rhs = load_vector(g, opt.source);
  PdeSolve out;
  out.stats = mg.solve(rhs, opt.pde_solver);
  out.u = VertexField(g, Domain::unit, coeff.level);
  out.u.values = std::move(out.stats.u);
  out.stats.u.clear();
  out.q = evaluate_qoi(out.u, coeff, opt.qoi);
  return out;
}

CorrectionDetail pde_correction_detail(int level, const PdeOptions& opt, RandomStream stream) {
  if (level < 0 || level > opt.max_level)
    throw std::invalid_argument("level " + std::to_string(level) + " outside the PDE hierarchy");
  const GridHierarchy hier = opt.hierarchy();
  auto field = sample_gaussian_field(hier, level, opt.covariance, stream.split(kPurposeField),
                                     opt.field_solver);
  VertexField k = std::move(field.z);
  for (double& v : k.values) v = std::exp(v);

  CorrectionDetail d;
  d.field_residual = field.solve.relative_residual();
  d.work_units = field.solve.work_units;
  const PdeSolve fine = solve_model_problem(k, opt);
  d.fine_residual = fine.stats.relative_residual();
  d.work_units += fine.stats.work_units;
  d.record.level = level;
  d.record.q_fine = fine.q;
  d.record.y_value = fine.q;
  if (level > 0) {
    VertexField kc(k.grid.coarse(), Domain::unit, level - 1);
    kc.values = inject(k.grid, k.values);
    const PdeSolve coarse = solve_model_problem(kc, opt);
    d.q_coarse = coarse.q;
    d.coarse_residual = coarse.stats.relative_residual();
    d.work_units += coarse.stats.work_units;
    d.record.y_value = fine.q - coarse.q;
  }
  d.record.duration = static_cast<double>(d.work_units) * opt.seconds_per_update;
  d.record.stream_id = stream.path_hash();
  return d;
}

SampleRecord pde_correction_sample(int level, const PdeOptions& opt, RandomStream stream) {
  return pde_correction_detail(level, opt, stream).record;
}

PdeBackend::PdeBackend(PdeOptions opt) : opt_(std::move(opt)) { opt_.validate(); }

SampleRecord PdeBackend::draw(int level, std::int64_t index, const RandomStream& root) const {
  SampleRecord r = pde_correction_sample(level, opt_, sample_stream(root, level, index));
  r.index = index;
  return r;
}

}  // namespace mlmc::pde
