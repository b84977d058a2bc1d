#ifndef CHIPLETPLACE_STRESS_HPP
#define CHIPLETPLACE_STRESS_HPP

// Thermo-mechanical stress surrogate. Two load mechanisms are modeled and
// superposed per cell:
//  - CTE mismatch against the interposer under the solved temperature
//    field: in-plane normal stresses, plane-stress (sigma_z = 0);
//  - self-weight of the stack above the interposer: transverse shear from
//    a simply-supported-plate column-load approximation, per axis.
// The reduction to a scalar is the von Mises equivalent stress.

#include "chipletplace/grid.hpp"
#include "chipletplace/thermal.hpp"

#include <vector>

namespace chiplet {

struct StressTensor {
  double sx = 0.0, sy = 0.0, sz = 0.0;    // MPa
  double txy = 0.0, tyz = 0.0, tzx = 0.0; // MPa
};

inline StressTensor operator+(const StressTensor& a, const StressTensor& b) {
  return {a.sx + b.sx, a.sy + b.sy, a.sz + b.sz,
          a.txy + b.txy, a.tyz + b.tyz, a.tzx + b.tzx};
}

struct TensorField {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0;
  std::vector<StressTensor> cells;

  std::size_t idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }
};

// Equivalent (von Mises) stress of one tensor, MPa.
double von_mises(const StressTensor& s);

// CTE-mismatch normal stresses: sx = sy = E/(1-nu) * |a_cell - a_ip| * dT,
// sz = 0; air cells stay zero.
TensorField thermo_elastic_stress(const ScalarField& t, const VoxelGrid& g, double ambient,
                                  ExecMode mode = ExecMode::Parallel);

// Self-weight transverse shear in the interposer plate; tau = 3V/(2A) per
// axis from the column overburden load. Zero everywhere when gravity is 0.
TensorField self_weight_shear(const VoxelGrid& g, const ArchitectureSpec& spec);

struct StressResult {
  ScalarField field;       // per-cell von Mises, MPa
  double peak = 0.0;       // package reduction (max, or p99 when configured)
  TensorField tensors;     // superposed per-cell tensors
};

// Full surrogate: thermo-elastic + self-weight, reduced per cell.
StressResult evaluate_stress(const ScalarField& t, const VoxelGrid& g,
                             const ArchitectureSpec& spec,
                             ExecMode mode = ExecMode::Parallel);

} // namespace chiplet

#endif
