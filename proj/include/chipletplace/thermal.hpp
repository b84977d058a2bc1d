#ifndef CHIPLETPLACE_THERMAL_HPP
#define CHIPLETPLACE_THERMAL_HPP

// Steady-state heat conduction on the voxel grid. Seven-point finite-volume
// stencil with harmonic-mean interface conductivities; convective (Robin)
// conditions on the top and bottom faces are folded into the boundary-face
// conductance, side walls are adiabatic. The assembled system is SPD and is
// solved with Jacobi-preconditioned conjugate gradients.
//
// Kernels have a serial reference path and an OpenMP path; for a fixed
// thread count both are deterministic, and they agree to reduction
// round-off (~1e-12 relative).

#include "chipletplace/grid.hpp"

#include <vector>

namespace chiplet {

struct ScalarField {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0; // mm
  std::vector<double> values;

  std::size_t idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }
  std::size_t size() const { return values.size(); }
};

struct BoundaryConditions {
  double h_top = 0.0;    // W/(m^2*K)
  double h_bottom = 0.0; // W/(m^2*K)
  double ambient = 23.0; // degC
};

enum class ExecMode { Serial, Parallel };

struct SolveOptions {
  double tolerance = 1e-10; // relative residual target
  long max_iterations = 0;  // 0 = automatic cap from the grid size
  ExecMode mode = ExecMode::Parallel;
};

struct SolveStats {
  long iterations = 0;
  double residual = 0.0;       // final relative residual
  double energy_balance = 0.0; // |convective outflow - injected| / injected
};

// Solves for the temperature field (degC). Zero injected power returns the
// ambient field exactly. Throws SolverError on non-convergence.
ScalarField solve_steady_state(const VoxelGrid& g, const BoundaryConditions& bc,
                               const SolveOptions& opts = {}, SolveStats* stats = nullptr);

double peak_temperature(const ScalarField& t);
double min_temperature(const ScalarField& t);

struct GradientStats {
  double mean = 0.0;   // degC/mm
  double stddev = 0.0; // population standard deviation
  double max = 0.0;
};

// Per-cell in-plane gradient magnitude on horizontal plane `plane_z`
// (central differences inside, one-sided at the plane edges) plus summary
// statistics. The optional output field has nz = 1.
GradientStats surface_gradient_stats(const ScalarField& t, int plane_z,
                                     ScalarField* gradient_out = nullptr);

// Copies one horizontal plane into an nz = 1 field.
ScalarField extract_plane(const ScalarField& f, int plane_z);

} // namespace chiplet

#endif
