#ifndef CHIPLETPLACE_MODEL_HPP
#define CHIPLETPLACE_MODEL_HPP

// Domain model for 2.5D chiplet packages. All types are immutable value
// types after construction/validation; safe to share across threads.
//
// Units: lateral dimensions mm, layer thicknesses um, power W, thermal
// conductivity W/(m*K), CTE ppm/degC, Young's modulus GPa, density kg/m^3,
// heat transfer coefficients W/(m^2*K), temperatures degC, stress MPa.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chiplet {

struct Material {
  std::string name;
  double thermal_conductivity = 0.0; // W/(m*K), > 0
  double cte = 0.0;                  // ppm/degC, >= 0
  double youngs_modulus = 0.0;       // GPa, > 0
  double poisson_ratio = 0.25;       // [0, 0.5)
  double density = 0.0;              // kg/m^3, > 0

  void validate() const; // throws ValidationError on violated invariant
};

enum class LayerRole {
  Substrate,
  C4,
  Interposer,
  Microbump,
  Chiplet,
  Tim,
  Heatsink,
  Underfill,
};

const char* layer_role_name(LayerRole role);
std::optional<LayerRole> layer_role_from_name(const std::string& name);

struct LayerSpec {
  LayerRole role = LayerRole::Substrate;
  std::string material;               // name into ArchitectureSpec::materials
  double thickness = 0.0;             // um, > 0
  std::string fill_material;          // bump layers only: homogenized filler
};

struct PowerMap {
  int rows = 0;
  int cols = 0;
  std::vector<double> cell_w; // row-major, W per map cell; sums to chiplet power
};

struct ChipletSpec {
  std::string name;
  double width = 0.0;  // mm
  double height = 0.0; // mm
  double power = 0.0;  // W, uniform unless power_map present
  double thickness = 150.0; // um
  std::string material;     // defaults to the chiplet layer material
  std::optional<PowerMap> power_map;
};

struct Net {
  std::string src;
  std::string dst;
  int wires = 1;          // the w_ij of the length objective
  double bandwidth = 0.0; // GB/s, informational
};

struct PackageConfig {
  double interposer_width = 0.0;  // mm
  double interposer_height = 0.0; // mm
  std::vector<LayerSpec> layers;  // bottom-to-top
  double h_top = 0.0;             // W/(m^2*K), heatsink convection
  double h_bottom = 10.0;         // W/(m^2*K), substrate convection
  double ambient = 23.0;          // degC
  double gravity = 9.81;          // m/s^2
  double sigma_max = 0.0;         // MPa, allowable stress for the stress weight
  double min_spacing = 0.1;       // mm, pairwise chiplet clearance
  double bump_area_fraction = 0.2;
  double route_pitch = 1.0;       // mm
  int route_capacity = 128;       // wires per routing edge
  bool stress_percentile_peak = false; // report 99th percentile instead of max
};

enum class Rotation : std::uint8_t { R0 = 0, R90 = 1, R180 = 2, R270 = 3 };

inline int rotation_degrees(Rotation r) { return static_cast<int>(r) * 90; }
std::optional<Rotation> rotation_from_degrees(int deg);

struct PlacedChiplet {
  double x = 0.0; // mm, rectangle center in interposer coordinates
  double y = 0.0;
  Rotation rotation = Rotation::R0;

  bool operator==(const PlacedChiplet&) const = default;
};

struct Placement {
  std::map<std::string, PlacedChiplet, std::less<>> entries;

  bool operator==(const Placement&) const = default;
};

// Axis-aligned rectangle, used for footprints and overlap tests.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct ArchitectureSpec {
  std::string name; // derived from the config file stem unless set explicitly
  PackageConfig package;
  std::map<std::string, Material, std::less<>> materials;
  std::vector<ChipletSpec> chiplets;
  std::vector<Net> nets;

  const ChipletSpec* find_chiplet(const std::string& name) const;
  const LayerSpec& interposer_layer() const;
  const LayerSpec* layer_with_role(LayerRole role) const; // nullptr if absent
  double total_power() const;

  // Cross-reference and invariant checks; throws ValidationError.
  void validate() const;
};

// One placement's objective triple, the input of the adaptive cost.
struct CandidateEvaluation {
  double peak_temp = 0.0;   // degC
  double peak_stress = 0.0; // MPa
  double wirelength = 0.0;  // mm
};

// Effective width/height of a chiplet after rotation (90/270 swap axes).
void rotated_extent(const ChipletSpec& c, Rotation r, double& w, double& h);

// Footprint rectangle of a placed chiplet.
Rect footprint(const ChipletSpec& c, const PlacedChiplet& p);

struct PlacementViolation {
  std::string message;
};

struct FeasibilityVerdict {
  std::vector<PlacementViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks containment, pairwise overlap and min_spacing clearance.
// Throws ValidationError if a spec chiplet is missing from the placement.
FeasibilityVerdict validate_placement(const Placement& p, const ArchitectureSpec& spec);

// Deterministic feasible starting placement; a single chiplet is centered.
// Throws ValidationError when the chiplets cannot be packed.
Placement initial_placement(const ArchitectureSpec& spec, std::uint64_t seed);

// Random feasible placement (used for normalization warm-up); falls back to
// initial_placement when rejection sampling fails on tight instances.
class SplitMix64;
Placement random_placement(const ArchitectureSpec& spec, SplitMix64& rng);

} // namespace chiplet

#endif
