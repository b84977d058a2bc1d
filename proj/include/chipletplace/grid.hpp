#ifndef CHIPLETPLACE_GRID_HPP
#define CHIPLETPLACE_GRID_HPP

// Voxelization of the layered package for the thermal and stress solvers.
// Lateral resolution is uniform (cells per mm); the vertical direction uses
// one cell per thin layer and two per chiplet/heatsink layer. Bump layers
// are homogenized with their fill material; cells not covered by any solid
// are air.

#include "chipletplace/model.hpp"

#include <cstdint>
#include <vector>

namespace chiplet {

struct MaterialProps {
  std::string name;
  double k = 0.0;   // W/(m*K)
  double cte = 0.0; // ppm/degC
  double e = 0.0;   // GPa
  double nu = 0.0;
  double rho = 0.0; // kg/m^3
  bool solid = true; // air cells carry no stress
};

struct VoxelGrid {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0;     // mm
  std::vector<double> dz;        // mm, per z cell
  std::vector<double> z0;        // mm, bottom coordinate per z cell
  std::vector<int> layer_of_z;   // z cell -> index into package.layers
  std::vector<std::uint16_t> mat; // per-cell index into materials
  std::vector<double> power;     // W injected per cell
  std::vector<MaterialProps> materials; // [0] is always air
  int interposer_z_bot = -1;
  int interposer_z_top = -1;

  std::size_t cell(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }
  std::size_t num_cells() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  const MaterialProps& props(std::size_t c) const { return materials[mat[c]]; }
  double total_power() const;
  // mm^2 lateral cell area and mm cell centers
  double xc(int x) const { return (x + 0.5) * dx; }
  double yc(int y) const { return (y + 0.5) * dy; }
};

// Voxelizes the stack for a feasible placement. `resolution` is lateral
// cells per mm. Throws ValidationError when a chiplet is thinner than one
// cell layer or taller than the chiplet layer.
VoxelGrid build_grid(const ArchitectureSpec& spec, const Placement& p, double resolution);

} // namespace chiplet

#endif
