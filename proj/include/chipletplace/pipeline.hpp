#ifndef CHIPLETPLACE_PIPELINE_HPP
#define CHIPLETPLACE_PIPELINE_HPP

// Candidate evaluation pipeline: voxelize -> thermal solve -> stress
// surrogate -> routing (or HPWL proxy). Stateless with respect to the
// placement; safe to call concurrently on distinct placements.

#include "chipletplace/anneal.hpp"
#include "chipletplace/grid.hpp"
#include "chipletplace/metrics.hpp"
#include "chipletplace/router.hpp"
#include "chipletplace/stress.hpp"
#include "chipletplace/thermal.hpp"

namespace chiplet {

struct PipelineOptions {
  double resolution = 1.0; // lateral cells per mm
  double pitch = 0.0;      // mm; 0 = package default
  int capacity = 0;        // wires per edge; 0 = package default
  ExecMode mode = ExecMode::Parallel;
};

class PipelineEvaluator {
public:
  PipelineEvaluator(const ArchitectureSpec& spec, PipelineOptions opts = {});

  // The annealer callback: peak T, peak sigma_vm and wirelength (routed,
  // or the HPWL proxy when full_route is false).
  CandidateEvaluation evaluate(const Placement& p, bool full_route) const;

  EvalFn as_eval_fn() const {
    return [this](const Placement& p, bool full_route) { return evaluate(p, full_route); };
  }

  struct FullSolution {
    VoxelGrid grid;
    ScalarField temperature;
    SolveStats solve_stats;
    StressResult stress;
    RouteResult route;
    GradientStats grad;
    ScalarField grad_plane;  // interposer top plane, degC/mm
    ScalarField temp_plane;  // interposer top plane
    ScalarField svm_plane;   // interposer top plane
    FieldCorrelations correlations;
    bool correlations_defined = false;
    CandidateEvaluation eval;
  };

  // Full solve with field outputs and plane statistics for reports.
  FullSolution solve_full(const Placement& p) const;

  const ArchitectureSpec& spec() const { return spec_; }
  const PipelineOptions& options() const { return opts_; }
  double pitch() const;
  int capacity() const;

private:
  const ArchitectureSpec& spec_;
  PipelineOptions opts_;
};

} // namespace chiplet

#endif
