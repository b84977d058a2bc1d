#include "chipletplace/stress.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>

namespace chiplet {

double von_mises(const StressTensor& s) {
  double d1 = s.sx - s.sy;
  double d2 = s.sy - s.sz;
  double d3 = s.sz - s.sx;
  double shear = s.txy * s.txy + s.tyz * s.tyz + s.tzx * s.tzx;
  return std::sqrt(0.5 * (d1 * d1 + d2 * d2 + d3 * d3) + 3.0 * shear);
}

namespace {

double interposer_cte(const VoxelGrid& g) {
  if (g.interposer_z_bot < 0) throw ValidationError("grid has no interposer layer");
  return g.props(g.cell(0, 0, g.interposer_z_bot)).cte;
}

void check_same_grid(const ScalarField& t, const VoxelGrid& g) {
  if (t.nx != g.nx || t.ny != g.ny || t.nz != g.nz)
    throw ValidationError("temperature field does not match the grid");
}

} // namespace

TensorField thermo_elastic_stress(const ScalarField& t, const VoxelGrid& g, double ambient,
                                  ExecMode mode) {
  check_same_grid(t, g);
  TensorField out;
  out.nx = g.nx;
  out.ny = g.ny;
  out.nz = g.nz;
  out.dx = g.dx;
  out.dy = g.dy;
  out.cells.assign(g.num_cells(), StressTensor{});

  const double alpha_ref = interposer_cte(g);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.num_cells());

  auto kernel = [&](std::ptrdiff_t i) {
    const MaterialProps& m = g.materials[g.mat[static_cast<std::size_t>(i)]];
    if (!m.solid) return;
    double d_alpha = std::abs(m.cte - alpha_ref) * 1e-6; // 1/degC
    double dt = t.values[static_cast<std::size_t>(i)] - ambient;
    double e_mpa = m.e * 1e3;
    double biaxial = e_mpa / (1.0 - m.nu) * d_alpha * dt;
    StressTensor& s = out.cells[static_cast<std::size_t>(i)];
    s.sx = biaxial;
    s.sy = biaxial;
    // sz stays 0: plane stress for the thin stack
  };

  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) kernel(i);
  }
  return out;
}

TensorField self_weight_shear(const VoxelGrid& g, const ArchitectureSpec& spec) {
  TensorField out;
  out.nx = g.nx;
  out.ny = g.ny;
  out.nz = g.nz;
  out.dx = g.dx;
  out.dy = g.dy;
  out.cells.assign(g.num_cells(), StressTensor{});

  const double grav = spec.package.gravity;
  if (grav == 0.0) return out;
  if (g.interposer_z_bot < 0) throw ValidationError("grid has no interposer layer");

  const double dx_m = g.dx * 1e-3, dy_m = g.dy * 1e-3;
  double t_ip_m = 0.0;
  for (int z = g.interposer_z_bot; z <= g.interposer_z_top; ++z) t_ip_m += g.dz[z] * 1e-3;

  // overburden areal load from everything above the interposer, N/m^2
  std::vector<double> load(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  for (int z = g.interposer_z_top + 1; z < g.nz; ++z) {
    double dz_m = g.dz[z] * 1e-3;
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x)
        load[static_cast<std::size_t>(y) * g.nx + x] +=
            grav * g.props(g.cell(x, y, z)).rho * dz_m;
  }

  // per-row beam along x: shear force at cell centers of a simply
  // supported span, tau_zx = 3V/(2A) with A the strip cross-section
  const double span_x = g.nx * dx_m;
  const double area_x = dy_m * t_ip_m;
  std::vector<double> tau_zx(load.size(), 0.0);
  for (int y = 0; y < g.ny; ++y) {
    double reaction = 0.0;
    for (int x = 0; x < g.nx; ++x) {
      double q = load[static_cast<std::size_t>(y) * g.nx + x] * dy_m; // N/m
      double xc = (x + 0.5) * dx_m;
      reaction += q * dx_m * (span_x - xc) / span_x;
    }
    double consumed = 0.0;
    for (int x = 0; x < g.nx; ++x) {
      double q = load[static_cast<std::size_t>(y) * g.nx + x] * dy_m;
      double v = reaction - consumed - q * dx_m / 2.0;
      tau_zx[static_cast<std::size_t>(y) * g.nx + x] = 3.0 * v / (2.0 * area_x) * 1e-6; // MPa
      consumed += q * dx_m;
    }
  }

  const double span_y = g.ny * dy_m;
  const double area_y = dx_m * t_ip_m;
  std::vector<double> tau_yz(load.size(), 0.0);
  for (int x = 0; x < g.nx; ++x) {
    double reaction = 0.0;
    for (int y = 0; y < g.ny; ++y) {
      double q = load[static_cast<std::size_t>(y) * g.nx + x] * dx_m;
      double yc = (y + 0.5) * dy_m;
      reaction += q * dy_m * (span_y - yc) / span_y;
    }
    double consumed = 0.0;
    for (int y = 0; y < g.ny; ++y) {
      double q = load[static_cast<std::size_t>(y) * g.nx + x] * dx_m;
      double v = reaction - consumed - q * dy_m / 2.0;
      tau_yz[static_cast<std::size_t>(y) * g.nx + x] = 3.0 * v / (2.0 * area_y) * 1e-6;
      consumed += q * dy_m;
    }
  }

  for (int z = g.interposer_z_bot; z <= g.interposer_z_top; ++z) {
    for (int y = 0; y < g.ny; ++y) {
      for (int x = 0; x < g.nx; ++x) {
        StressTensor& s = out.cells[out.idx(x, y, z)];
        s.tzx = tau_zx[static_cast<std::size_t>(y) * g.nx + x];
        s.tyz = tau_yz[static_cast<std::size_t>(y) * g.nx + x];
        // txy stays 0
      }
    }
  }
  return out;
}

StressResult evaluate_stress(const ScalarField& t, const VoxelGrid& g,
                             const ArchitectureSpec& spec, ExecMode mode) {
  check_same_grid(t, g);
  TensorField te = thermo_elastic_stress(t, g, spec.package.ambient, mode);
  TensorField sw = self_weight_shear(g, spec);

  StressResult res;
  res.tensors = te;
  res.field.nx = g.nx;
  res.field.ny = g.ny;
  res.field.nz = g.nz;
  res.field.dx = g.dx;
  res.field.dy = g.dy;
  res.field.values.assign(g.num_cells(), 0.0);

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.num_cells());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      StressTensor& s = res.tensors.cells[static_cast<std::size_t>(i)];
      s = s + sw.cells[static_cast<std::size_t>(i)];
      res.field.values[static_cast<std::size_t>(i)] = von_mises(s);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      StressTensor& s = res.tensors.cells[static_cast<std::size_t>(i)];
      s = s + sw.cells[static_cast<std::size_t>(i)];
      res.field.values[static_cast<std::size_t>(i)] = von_mises(s);
    }
  }

  if (spec.package.stress_percentile_peak) {
    std::vector<double> copy = res.field.values;
    std::size_t k = static_cast<std::size_t>(0.99 * (copy.size() - 1));
    std::nth_element(copy.begin(), copy.begin() + k, copy.end());
    res.peak = copy[k];
  } else {
    double m = 0.0;
    for (double v : res.field.values) m = std::max(m, v);
    res.peak = m;
  }
  return res;
}

} // namespace chiplet
