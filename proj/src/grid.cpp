#include "chipletplace/grid.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace chiplet {

double VoxelGrid::total_power() const {
  double p = 0.0;
  for (double w : power) p += w;
  return p;
}

namespace {

MaterialProps air_props() {
  MaterialProps air;
  air.name = "air";
  air.k = 0.026;
  air.cte = 0.0;
  air.e = 0.0;
  air.nu = 0.0;
  air.rho = 1.2;
  air.solid = false;
  return air;
}

MaterialProps from_material(const Material& m) {
  MaterialProps p;
  p.name = m.name;
  p.k = m.thermal_conductivity;
  p.cte = m.cte;
  p.e = m.youngs_modulus;
  p.nu = m.poisson_ratio;
  p.rho = m.density;
  p.solid = true;
  return p;
}

// Area-weighted parallel mixture of bump metal and fill.
MaterialProps homogenize(const Material& bump, const Material& fill, double f) {
  MaterialProps p;
  p.name = bump.name + "+" + fill.name;
  p.k = f * bump.thermal_conductivity + (1.0 - f) * fill.thermal_conductivity;
  p.cte = f * bump.cte + (1.0 - f) * fill.cte;
  p.e = f * bump.youngs_modulus + (1.0 - f) * fill.youngs_modulus;
  p.nu = f * bump.poisson_ratio + (1.0 - f) * fill.poisson_ratio;
  p.rho = f * bump.density + (1.0 - f) * fill.density;
  p.solid = true;
  return p;
}

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Rotates a rectangle given in chiplet-local center coordinates.
Rect rotate_rect(const Rect& r, Rotation rot) {
  switch (rot) {
    case Rotation::R0: return r;
    case Rotation::R90: return Rect{-r.y1, r.x0, -r.y0, r.x1};
    case Rotation::R180: return Rect{-r.x1, -r.y1, -r.x0, -r.y0};
    case Rotation::R270: return Rect{r.y0, -r.x1, r.y1, -r.x0};
  }
  return r;
}

} // namespace

VoxelGrid build_grid(const ArchitectureSpec& spec, const Placement& p, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("resolution must be > 0");
  FeasibilityVerdict verdict = validate_placement(p, spec);
  if (!verdict.ok())
    throw ValidationError("build_grid requires a feasible placement: " +
                          verdict.violations.front().message);

  const PackageConfig& pkg = spec.package;
  VoxelGrid g;
  g.nx = std::max<int>(1, static_cast<int>(std::llround(pkg.interposer_width * resolution)));
  g.ny = std::max<int>(1, static_cast<int>(std::llround(pkg.interposer_height * resolution)));
  g.dx = pkg.interposer_width / g.nx;
  g.dy = pkg.interposer_height / g.ny;

  // vertical discretization: two cells for the thick layers
  double z = 0.0;
  for (std::size_t li = 0; li < pkg.layers.size(); ++li) {
    const LayerSpec& layer = pkg.layers[li];
    int cells = (layer.role == LayerRole::Chiplet || layer.role == LayerRole::Heatsink) ? 2 : 1;
    double t_mm = layer.thickness * 1e-3;
    for (int c = 0; c < cells; ++c) {
      g.dz.push_back(t_mm / cells);
      g.z0.push_back(z);
      g.layer_of_z.push_back(static_cast<int>(li));
      z += t_mm / cells;
    }
  }
  g.nz = static_cast<int>(g.dz.size());

  g.materials.push_back(air_props());
  std::map<std::string, std::uint16_t> mat_index;
  auto intern = [&](const MaterialProps& props) {
    auto it = mat_index.find(props.name);
    if (it != mat_index.end()) return it->second;
    auto idx = static_cast<std::uint16_t>(g.materials.size());
    g.materials.push_back(props);
    mat_index.emplace(props.name, idx);
    return idx;
  };

  g.mat.assign(g.num_cells(), 0);
  g.power.assign(g.num_cells(), 0.0);

  // layer material fill; chiplet/microbump layers are shaped by footprints
  for (int zc = 0; zc < g.nz; ++zc) {
    const LayerSpec& layer = pkg.layers[static_cast<std::size_t>(g.layer_of_z[zc])];
    if (layer.role == LayerRole::Interposer) {
      if (g.interposer_z_bot < 0) g.interposer_z_bot = zc;
      g.interposer_z_top = zc;
    }
    if (layer.role == LayerRole::Chiplet || layer.role == LayerRole::Microbump) continue;
    MaterialProps props;
    if (!layer.fill_material.empty()) {
      props = homogenize(spec.materials.at(layer.material),
                         spec.materials.at(layer.fill_material), pkg.bump_area_fraction);
    } else {
      props = from_material(spec.materials.at(layer.material));
    }
    std::uint16_t mi = intern(props);
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x) g.mat[g.cell(x, y, zc)] = mi;
  }

  // chiplet and microbump cells exist only under placed footprints
  const LayerSpec* chiplet_layer = spec.layer_with_role(LayerRole::Chiplet);
  for (const ChipletSpec& c : spec.chiplets) {
    const PlacedChiplet& pc = p.entries.at(c.name);
    Rect fp = footprint(c, pc);
    int x_lo = std::max(0, static_cast<int>(std::floor(fp.x0 / g.dx)));
    int x_hi = std::min(g.nx - 1, static_cast<int>(std::ceil(fp.x1 / g.dx)) - 1);
    int y_lo = std::max(0, static_cast<int>(std::floor(fp.y0 / g.dy)));
    int y_hi = std::min(g.ny - 1, static_cast<int>(std::ceil(fp.y1 / g.dy)) - 1);

    std::uint16_t cmat = intern(from_material(
        spec.materials.at(c.material.empty() ? chiplet_layer->material : c.material)));

    // vertical occupancy inside the chiplet layer
    std::vector<int> occupied_z;
    int power_z = -1;
    double layer_bottom = -1.0;
    for (int zc = 0; zc < g.nz; ++zc) {
      if (pkg.layers[static_cast<std::size_t>(g.layer_of_z[zc])].role != LayerRole::Chiplet)
        continue;
      if (layer_bottom < 0.0) layer_bottom = g.z0[zc];
      double center_above_bottom = g.z0[zc] + g.dz[zc] / 2.0 - layer_bottom;
      if (center_above_bottom < c.thickness * 1e-3) {
        occupied_z.push_back(zc);
        if (power_z < 0) power_z = zc; // active side faces the interposer
      }
    }
    if (occupied_z.empty()) {
      std::ostringstream os;
      os << "chiplet '" << c.name << "' (thickness " << c.thickness
         << " um) is thinner than one cell layer of the chiplet stack";
      throw ValidationError(os.str());
    }

    std::uint16_t ubump_mat = 0;
    std::vector<int> ubump_z;
    if (const LayerSpec* ub = spec.layer_with_role(LayerRole::Microbump)) {
      MaterialProps props =
          ub->fill_material.empty()
              ? from_material(spec.materials.at(ub->material))
              : homogenize(spec.materials.at(ub->material),
                           spec.materials.at(ub->fill_material), pkg.bump_area_fraction);
      ubump_mat = intern(props);
      for (int zc = 0; zc < g.nz; ++zc)
        if (pkg.layers[static_cast<std::size_t>(g.layer_of_z[zc])].role == LayerRole::Microbump)
          ubump_z.push_back(zc);
    }

    // lateral claim: a cell belongs to the chiplet when the footprint covers
    // at least half of it; guarantees at least the cell under the center
    std::vector<std::pair<int, int>> claimed;
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        double ox = overlap_1d(fp.x0, fp.x1, x * g.dx, (x + 1) * g.dx);
        double oy = overlap_1d(fp.y0, fp.y1, y * g.dy, (y + 1) * g.dy);
        if (ox * oy >= 0.5 * g.dx * g.dy) claimed.emplace_back(x, y);
      }
    }
    if (claimed.empty()) {
      int cx = std::clamp(static_cast<int>(pc.x / g.dx), 0, g.nx - 1);
      int cy = std::clamp(static_cast<int>(pc.y / g.dy), 0, g.ny - 1);
      claimed.emplace_back(cx, cy);
    }
    std::vector<char> is_claimed(static_cast<std::size_t>(g.nx) * g.ny, 0);
    for (auto [x, y] : claimed) {
      is_claimed[static_cast<std::size_t>(y) * g.nx + x] = 1;
      for (int zc : occupied_z) g.mat[g.cell(x, y, zc)] = cmat;
      for (int zc : ubump_z) g.mat[g.cell(x, y, zc)] = ubump_mat;
    }

    // power deposition: bottom chiplet cell layer, exact-overlap split over
    // the claimed cells, rescaled so the cell sources sum to the chiplet
    // power exactly
    if (c.power > 0.0) {
      std::vector<std::pair<std::size_t, double>> deposits;
      auto deposit_rect = [&](const Rect& r, double watts) {
        double area = (r.x1 - r.x0) * (r.y1 - r.y0);
        int bx_lo = std::max(0, static_cast<int>(std::floor(r.x0 / g.dx)));
        int bx_hi = std::min(g.nx - 1, static_cast<int>(std::ceil(r.x1 / g.dx)) - 1);
        int by_lo = std::max(0, static_cast<int>(std::floor(r.y0 / g.dy)));
        int by_hi = std::min(g.ny - 1, static_cast<int>(std::ceil(r.y1 / g.dy)) - 1);
        for (int y = by_lo; y <= by_hi; ++y) {
          for (int x = bx_lo; x <= bx_hi; ++x) {
            if (!is_claimed[static_cast<std::size_t>(y) * g.nx + x]) continue;
            double ox = overlap_1d(r.x0, r.x1, x * g.dx, (x + 1) * g.dx);
            double oy = overlap_1d(r.y0, r.y1, y * g.dy, (y + 1) * g.dy);
            if (ox <= 0.0 || oy <= 0.0) continue;
            deposits.emplace_back(g.cell(x, y, power_z), watts * (ox * oy) / area);
          }
        }
      };
      if (!c.power_map) {
        deposit_rect(fp, c.power);
      } else {
        const PowerMap& pm = *c.power_map;
        // map cell rectangles in chiplet-local coordinates (row 0 = min y)
        double cw = c.width / pm.cols, ch = c.height / pm.rows;
        for (int r = 0; r < pm.rows; ++r) {
          for (int col = 0; col < pm.cols; ++col) {
            double w_cell = pm.cell_w[static_cast<std::size_t>(r) * pm.cols + col];
            if (w_cell == 0.0) continue;
            Rect local{col * cw - c.width / 2.0, r * ch - c.height / 2.0,
                       (col + 1) * cw - c.width / 2.0, (r + 1) * ch - c.height / 2.0};
            Rect rot = rotate_rect(local, pc.rotation);
            deposit_rect(Rect{rot.x0 + pc.x, rot.y0 + pc.y, rot.x1 + pc.x, rot.y1 + pc.y},
                         w_cell);
          }
        }
      }
      double captured = 0.0;
      for (const auto& [cell, watts] : deposits) captured += watts;
      if (captured <= 0.0)
        throw ValidationError("chiplet '" + c.name +
                              "': footprint captures no grid cell (resolution too coarse)");
      double scale = c.power / captured;
      for (const auto& [cell, watts] : deposits) g.power[cell] += watts * scale;
    }
  }

  return g;
}

} // namespace chiplet
