// Serial vs OpenMP benchmark for the evaluation kernels: thermal solve and
// stress surrogate on a synthetic 4-chiplet package at a few resolutions.

#include "chipletplace/config.hpp"
#include "chipletplace/grid.hpp"
#include "chipletplace/pipeline.hpp"
#include "chipletplace/stress.hpp"
#include "chipletplace/thermal.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace chiplet;

namespace {

const char* kBenchConfig = R"(
name = "bench"
[package]
interposer_width_mm = 32.0
interposer_height_mm = 32.0
h_top = 900.0
sigma_max_mpa = 100.0

[[package.layers]]
role = "substrate"
material = "fr4"
thickness_um = 1000.0

[[package.layers]]
role = "interposer"
material = "silicon_ip"
thickness_um = 100.0

[[package.layers]]
role = "chiplet"
material = "silicon"
thickness_um = 150.0

[[package.layers]]
role = "heatsink"
material = "copper"
thickness_um = 2000.0

[materials.fr4]
thermal_conductivity = 0.3
cte_ppm = 13.0
youngs_modulus_gpa = 20.0

[materials.silicon_ip]
thermal_conductivity = 148.0
cte_ppm = 2.6
youngs_modulus_gpa = 150.0

[materials.silicon]
thermal_conductivity = 150.0
cte_ppm = 3.1
youngs_modulus_gpa = 130.0

[materials.copper]
thermal_conductivity = 398.0
cte_ppm = 16.0
youngs_modulus_gpa = 120.0

[[chiplets]]
name = "a"
width_mm = 10.0
height_mm = 10.0
power_w = 40.0

[[chiplets]]
name = "b"
width_mm = 8.0
height_mm = 8.0
power_w = 20.0

[[chiplets]]
name = "c"
width_mm = 6.0
height_mm = 6.0
power_w = 10.0

[[chiplets]]
name = "d"
width_mm = 6.0
height_mm = 6.0
power_w = 10.0
)";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BenchResult {
  double solve_s = 0.0;
  double stress_s = 0.0;
  long iterations = 0;
  double peak_t = 0.0;
};

BenchResult run_case(const ArchitectureSpec& spec, const Placement& p, double resolution,
                     ExecMode mode, int reps) {
  BenchResult res;
  VoxelGrid grid = build_grid(spec, p, resolution);
  BoundaryConditions bc{spec.package.h_top, spec.package.h_bottom, spec.package.ambient};
  SolveOptions so;
  so.mode = mode;

  ScalarField temp;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    SolveStats stats;
    temp = solve_steady_state(grid, bc, so, &stats);
    res.iterations = stats.iterations;
  }
  res.solve_s = seconds_since(t0) / reps;
  res.peak_t = peak_temperature(temp);

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) evaluate_stress(temp, grid, spec, mode);
  res.stress_s = seconds_since(t0) / reps;
  return res;
}

} // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::stoi(argv[1]) : 3;

  ArchitectureSpec spec = parse_architecture(kBenchConfig, "bench");
  Placement p = initial_placement(spec, 1);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("%10s %8s %12s %12s %12s %12s %9s\n", "resolution", "cells", "solve_ser_s",
              "solve_omp_s", "stress_ser_s", "stress_omp_s", "speedup");

  for (double resolution : {1.0, 2.0, 4.0}) {
    VoxelGrid grid = build_grid(spec, p, resolution);
    BenchResult ser = run_case(spec, p, resolution, ExecMode::Serial, reps);
    BenchResult par = run_case(spec, p, resolution, ExecMode::Parallel, reps);
    double speedup = ser.solve_s / par.solve_s;
    std::printf("%10.1f %8zu %12.4f %12.4f %12.5f %12.5f %8.2fx\n", resolution,
                grid.num_cells(), ser.solve_s, par.solve_s, ser.stress_s, par.stress_s,
                speedup);
    double drift = std::abs(ser.peak_t - par.peak_t);
    if (drift > 1e-6)
      std::printf("  warning: serial/parallel peak T drift %.3e C\n", drift);
  }
  return 0;
}
