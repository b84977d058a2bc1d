#include "chipletplace/pipeline.hpp"

#include "chipletplace/error.hpp"

namespace chiplet {

PipelineEvaluator::PipelineEvaluator(const ArchitectureSpec& spec, PipelineOptions opts)
    : spec_(spec), opts_(opts) {
  if (!(opts_.resolution > 0.0)) throw ValidationError("resolution must be > 0");
}

double PipelineEvaluator::pitch() const {
  return opts_.pitch > 0.0 ? opts_.pitch : spec_.package.route_pitch;
}

int PipelineEvaluator::capacity() const {
  return opts_.capacity > 0 ? opts_.capacity : spec_.package.route_capacity;
}

CandidateEvaluation PipelineEvaluator::evaluate(const Placement& p, bool full_route) const {
  VoxelGrid grid = build_grid(spec_, p, opts_.resolution);
  BoundaryConditions bc{spec_.package.h_top, spec_.package.h_bottom, spec_.package.ambient};
  SolveOptions so;
  so.mode = opts_.mode;
  ScalarField temp = solve_steady_state(grid, bc, so);
  StressResult stress = evaluate_stress(temp, grid, spec_, opts_.mode);

  CandidateEvaluation e;
  e.peak_temp = peak_temperature(temp);
  e.peak_stress = stress.peak;
  if (full_route && !spec_.nets.empty()) {
    RoutingGraph rg = build_routing_graph(spec_, p, pitch(), capacity());
    e.wirelength = route_nets(rg, spec_.nets).total_wirelength;
  } else {
    e.wirelength = hpwl_estimate(p, spec_.nets);
  }
  return e;
}

PipelineEvaluator::FullSolution PipelineEvaluator::solve_full(const Placement& p) const {
  FullSolution out;
  out.grid = build_grid(spec_, p, opts_.resolution);
  BoundaryConditions bc{spec_.package.h_top, spec_.package.h_bottom, spec_.package.ambient};
  SolveOptions so;
  so.mode = opts_.mode;
  out.temperature = solve_steady_state(out.grid, bc, so, &out.solve_stats);
  out.stress = evaluate_stress(out.temperature, out.grid, spec_, opts_.mode);

  int plane = out.grid.interposer_z_top;
  out.grad = surface_gradient_stats(out.temperature, plane, &out.grad_plane);
  out.temp_plane = extract_plane(out.temperature, plane);
  out.svm_plane = extract_plane(out.stress.field, plane);
  try {
    out.correlations = field_correlations(out.temp_plane, out.svm_plane, out.grad_plane);
    out.correlations_defined = true;
  } catch (const ValidationError&) {
    out.correlations_defined = false; // constant field: correlation undefined
  }

  if (!spec_.nets.empty()) {
    RoutingGraph rg = build_routing_graph(spec_, p, pitch(), capacity());
    out.route = route_nets(rg, spec_.nets);
  }

  out.eval.peak_temp = peak_temperature(out.temperature);
  out.eval.peak_stress = out.stress.peak;
  out.eval.wirelength = out.route.total_wirelength;
  return out;
}

} // namespace chiplet
