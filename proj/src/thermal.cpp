#include "chipletplace/thermal.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

namespace chiplet {

namespace {

// Assembled 7-point system over theta = T - ambient:
//   diag[i]*theta[i] - sum_faces G_f*theta[nbr] = P[i]
// Face conductances are stored per direction; boundary conductances are in
// the diagonal only (their ambient term vanishes in theta form).
struct Stencil {
  int nx = 0, ny = 0, nz = 0;
  std::ptrdiff_t sx = 1, sy = 0, sz = 0;
  std::vector<double> gx; // (nx-1) * ny * nz, face between x and x+1
  std::vector<double> gy; // nx * (ny-1) * nz
  std::vector<double> gz; // nx * ny * (nz-1)
  std::vector<double> diag;
  std::vector<double> g_top;    // per lateral cell, top boundary face
  std::vector<double> g_bottom; // per lateral cell, bottom boundary face

  std::size_t cells() const { return diag.size(); }

  std::size_t gx_idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny + y) * (nx - 1) + x;
  }
  std::size_t gy_idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * (ny - 1) + y) * nx + x;
  }
  std::size_t gz_idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }

  double apply_at(const double* v, int x, int y, int z, std::size_t c) const {
    double acc = diag[c] * v[c];
    if (x > 0) acc -= gx[gx_idx(x - 1, y, z)] * v[c - sx];
    if (x < nx - 1) acc -= gx[gx_idx(x, y, z)] * v[c + sx];
    if (y > 0) acc -= gy[gy_idx(x, y - 1, z)] * v[c - sy];
    if (y < ny - 1) acc -= gy[gy_idx(x, y, z)] * v[c + sy];
    if (z > 0) acc -= gz[gz_idx(x, y, z - 1)] * v[c - sz];
    if (z < nz - 1) acc -= gz[gz_idx(x, y, z)] * v[c + sz];
    return acc;
  }

  void apply(const std::vector<double>& v, std::vector<double>& out, ExecMode mode) const {
    const double* vp = v.data();
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static) collapse(2)
      for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            std::size_t c = (static_cast<std::size_t>(z) * ny + y) * nx + x;
            out[c] = apply_at(vp, x, y, z, c);
          }
    } else {
      for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            std::size_t c = (static_cast<std::size_t>(z) * ny + y) * nx + x;
            out[c] = apply_at(vp, x, y, z, c);
          }
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b, ExecMode mode) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  double acc = 0.0;
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += a[i] * b[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += a[i] * b[i];
  }
  return acc;
}

// y += alpha * x
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y, ExecMode mode) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
  }
}

// p = z + beta * p
void xpby(const std::vector<double>& z, double beta, std::vector<double>& p, ExecMode mode) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(z.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
}

void hadamard(const std::vector<double>& a, const std::vector<double>& b,
              std::vector<double>& out, ExecMode mode) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
  }
}

Stencil assemble(const VoxelGrid& g, const BoundaryConditions& bc) {
  Stencil s;
  s.nx = g.nx;
  s.ny = g.ny;
  s.nz = g.nz;
  s.sx = 1;
  s.sy = g.nx;
  s.sz = static_cast<std::ptrdiff_t>(g.nx) * g.ny;

  const double dx = g.dx * 1e-3, dy = g.dy * 1e-3; // meters
  std::vector<double> dz(g.nz);
  for (int z = 0; z < g.nz; ++z) dz[z] = g.dz[z] * 1e-3;

  s.diag.assign(g.num_cells(), 0.0);
  s.gx.assign(static_cast<std::size_t>(g.nx - 1) * g.ny * g.nz, 0.0);
  s.gy.assign(static_cast<std::size_t>(g.nx) * (g.ny - 1) * g.nz, 0.0);
  s.gz.assign(static_cast<std::size_t>(g.nx) * g.ny * (g.nz - 1), 0.0);
  s.g_top.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  s.g_bottom.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);

  auto k_of = [&](std::size_t c) { return g.props(c).k; };

  for (int z = 0; z < g.nz; ++z) {
    for (int y = 0; y < g.ny; ++y) {
      for (int x = 0; x < g.nx; ++x) {
        std::size_t c = g.cell(x, y, z);
        if (x < g.nx - 1) {
          double area = dy * dz[z];
          double gcond = area / (dx / (2.0 * k_of(c)) + dx / (2.0 * k_of(c + 1)));
          s.gx[s.gx_idx(x, y, z)] = gcond;
          s.diag[c] += gcond;
          s.diag[c + 1] += gcond;
        }
        if (y < g.ny - 1) {
          double area = dx * dz[z];
          double gcond = area / (dy / (2.0 * k_of(c)) + dy / (2.0 * k_of(c + s.sy)));
          s.gy[s.gy_idx(x, y, z)] = gcond;
          s.diag[c] += gcond;
          s.diag[c + s.sy] += gcond;
        }
        if (z < g.nz - 1) {
          double area = dx * dy;
          double gcond =
              area / (dz[z] / (2.0 * k_of(c)) + dz[z + 1] / (2.0 * k_of(c + s.sz)));
          s.gz[s.gz_idx(x, y, z)] = gcond;
          s.diag[c] += gcond;
          s.diag[c + s.sz] += gcond;
        }
        if (z == 0) {
          double area = dx * dy;
          double gcond = area / (dz[z] / (2.0 * k_of(c)) + 1.0 / bc.h_bottom);
          s.g_bottom[static_cast<std::size_t>(y) * g.nx + x] = gcond;
          s.diag[c] += gcond;
        }
        if (z == g.nz - 1) {
          double area = dx * dy;
          double gcond = area / (dz[z] / (2.0 * k_of(c)) + 1.0 / bc.h_top);
          s.g_top[static_cast<std::size_t>(y) * g.nx + x] = gcond;
          s.diag[c] += gcond;
        }
      }
    }
  }
  return s;
}

} // namespace

ScalarField solve_steady_state(const VoxelGrid& g, const BoundaryConditions& bc,
                               const SolveOptions& opts, SolveStats* stats) {
  if (!(bc.h_top > 0.0) || !(bc.h_bottom > 0.0))
    throw ValidationError("solve_steady_state requires h_top > 0 and h_bottom > 0");
  if (g.num_cells() == 0) throw ValidationError("empty grid");

  ScalarField field;
  field.nx = g.nx;
  field.ny = g.ny;
  field.nz = g.nz;
  field.dx = g.dx;
  field.dy = g.dy;

  const std::size_t n = g.num_cells();
  const ExecMode mode = opts.mode;

  double p_total = g.total_power();
  if (p_total == 0.0) {
    // no sources: theta = 0 is the exact solution
    field.values.assign(n, bc.ambient);
    if (stats) *stats = SolveStats{0, 0.0, 0.0};
    return field;
  }

  Stencil A = assemble(g, bc);
  const std::vector<double>& b = g.power;

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / A.diag[i];

  std::vector<double> theta(n, 0.0), r = b, z(n), p(n), q(n);
  hadamard(r, inv_diag, z, mode);
  p = z;

  double b_norm2 = dot(b, b, mode);
  double rz = dot(r, z, mode);
  double tol2 = opts.tolerance * opts.tolerance * b_norm2;

  long cap = opts.max_iterations;
  if (cap <= 0) cap = static_cast<long>(5000.0 * std::cbrt(static_cast<double>(n))) + 100;

  long it = 0;
  double r_norm2 = dot(r, r, mode);
  while (r_norm2 > tol2 && it < cap) {
    A.apply(p, q, mode);
    double pq = dot(p, q, mode);
    double alpha = rz / pq;
    axpy(alpha, p, theta, mode);
    axpy(-alpha, q, r, mode);
    r_norm2 = dot(r, r, mode);
    if (r_norm2 <= tol2) {
      ++it;
      break;
    }
    hadamard(r, inv_diag, z, mode);
    double rz_new = dot(r, z, mode);
    double beta = rz_new / rz;
    rz = rz_new;
    xpby(z, beta, p, mode);
    ++it;
  }

  double rel_res = std::sqrt(r_norm2 / b_norm2);
  if (r_norm2 > tol2) {
    std::ostringstream os;
    os << "thermal solve did not converge: relative residual " << rel_res << " after " << it
       << " iterations (target " << opts.tolerance << ")";
    throw SolverError(os.str());
  }

  // discrete energy balance: convective outflow vs injected power
  double outflow = 0.0;
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      std::size_t lat = static_cast<std::size_t>(y) * g.nx + x;
      outflow += A.g_bottom[lat] * theta[g.cell(x, y, 0)];
      outflow += A.g_top[lat] * theta[g.cell(x, y, g.nz - 1)];
    }
  }
  double balance = std::abs(outflow - p_total) / std::abs(p_total);

  if (stats) *stats = SolveStats{it, rel_res, balance};

  field.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) field.values[i] = theta[i] + bc.ambient;
  return field;
}

double peak_temperature(const ScalarField& t) {
  double m = t.values.front();
  for (double v : t.values) m = std::max(m, v);
  return m;
}

double min_temperature(const ScalarField& t) {
  double m = t.values.front();
  for (double v : t.values) m = std::min(m, v);
  return m;
}

ScalarField extract_plane(const ScalarField& f, int plane_z) {
  if (plane_z < 0 || plane_z >= f.nz) throw ValidationError("plane index out of range");
  ScalarField out;
  out.nx = f.nx;
  out.ny = f.ny;
  out.nz = 1;
  out.dx = f.dx;
  out.dy = f.dy;
  out.values.resize(static_cast<std::size_t>(f.nx) * f.ny);
  for (int y = 0; y < f.ny; ++y)
    for (int x = 0; x < f.nx; ++x)
      out.values[out.idx(x, y, 0)] = f.values[f.idx(x, y, plane_z)];
  return out;
}

GradientStats surface_gradient_stats(const ScalarField& t, int plane_z,
                                     ScalarField* gradient_out) {
  if (plane_z < 0 || plane_z >= t.nz) throw ValidationError("plane index out of range");
  if (t.nx < 3 || t.ny < 3)
    throw ValidationError("gradient statistics need at least 3 cells per axis");

  ScalarField grad;
  grad.nx = t.nx;
  grad.ny = t.ny;
  grad.nz = 1;
  grad.dx = t.dx;
  grad.dy = t.dy;
  grad.values.resize(static_cast<std::size_t>(t.nx) * t.ny);

  auto at = [&](int x, int y) { return t.values[t.idx(x, y, plane_z)]; };

#pragma omp parallel for schedule(static)
  for (int y = 0; y < t.ny; ++y) {
    for (int x = 0; x < t.nx; ++x) {
      double gx, gy;
      if (x == 0) {
        gx = (at(1, y) - at(0, y)) / t.dx;
      } else if (x == t.nx - 1) {
        gx = (at(x, y) - at(x - 1, y)) / t.dx;
      } else {
        gx = (at(x + 1, y) - at(x - 1, y)) / (2.0 * t.dx);
      }
      if (y == 0) {
        gy = (at(x, 1) - at(x, 0)) / t.dy;
      } else if (y == t.ny - 1) {
        gy = (at(x, y) - at(x, y - 1)) / t.dy;
      } else {
        gy = (at(x, y + 1) - at(x, y - 1)) / (2.0 * t.dy);
      }
      grad.values[grad.idx(x, y, 0)] = std::hypot(gx, gy);
    }
  }

  GradientStats st;
  double sum = 0.0, sum2 = 0.0;
  for (double v : grad.values) {
    sum += v;
    sum2 += v * v;
    st.max = std::max(st.max, v);
  }
  double n = static_cast<double>(grad.values.size());
  st.mean = sum / n;
  st.stddev = std::sqrt(std::max(0.0, sum2 / n - st.mean * st.mean));
  if (gradient_out) *gradient_out = std::move(grad);
  return st;
}

} // namespace chiplet
