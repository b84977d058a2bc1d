#include "chipletplace/config.hpp"

#include "chipletplace/error.hpp"
#include "chipletplace/toml.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace chiplet {

namespace {

// Table 1 material classes: density defaults when the config omits them.
double default_density(const std::string& material_name) {
  std::string lower;
  for (char c : material_name) lower.push_back(static_cast<char>(std::tolower(c)));
  struct Entry {
    const char* pattern;
    double density;
  };
  static const Entry table[] = {
      {"sio2", 2200.0},   {"silicon", 2330.0}, {"copper", 8900.0},
      {"fr4", 1850.0},    {"fr-4", 1850.0},    {"tin-lead", 8400.0},
      {"solder", 8400.0}, {"sac", 8400.0},     {"indium", 7310.0},
  };
  for (const Entry& e : table)
    if (lower.find(e.pattern) != std::string::npos) return e.density;
  return 0.0;
}

class TableReader {
public:
  TableReader(const toml::Table& t, std::string context)
      : table_(t), context_(std::move(context)) {}

  ~TableReader() = default;

  double number(const std::string& key) {
    const toml::Value& v = require(key);
    if (!v.is_number()) type_error(key, "number", v);
    return v.as_number();
  }

  double number_or(const std::string& key, double fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (!v->is_number()) type_error(key, "number", *v);
    return v->as_number();
  }

  std::int64_t integer_or(const std::string& key, std::int64_t fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (!v->is_integer()) type_error(key, "integer", *v);
    return v->as_integer();
  }

  std::int64_t integer(const std::string& key) {
    const toml::Value& v = require(key);
    if (!v.is_integer()) type_error(key, "integer", v);
    return v.as_integer();
  }

  std::string string(const std::string& key) {
    const toml::Value& v = require(key);
    if (!v.is_string()) type_error(key, "string", v);
    return v.as_string();
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (!v->is_string()) type_error(key, "string", *v);
    return v->as_string();
  }

  bool bool_or(const std::string& key, bool fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (!v->is_bool()) type_error(key, "boolean", *v);
    return v->as_bool();
  }

  const toml::Value* optional(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    seen_.insert(key);
    return &it->second;
  }

  const toml::Value& require(const std::string& key) {
    const toml::Value* v = optional(key);
    if (!v) throw ConfigError(context_ + ": missing required key '" + key + "'");
    return *v;
  }

  // Every key must have been consumed; anything else is a schema error.
  void reject_unknown() const {
    for (const auto& [key, value] : table_)
      if (!seen_.count(key))
        throw ConfigError(context_ + ": unknown key '" + key + "'");
  }

private:
  [[noreturn]] void type_error(const std::string& key, const char* want,
                               const toml::Value& v) const {
    throw ConfigError(context_ + ": key '" + key + "' must be a " + want + ", got " +
                      v.type_name());
  }

  const toml::Table& table_;
  std::string context_;
  std::set<std::string> seen_;
};

const toml::Table& as_table(const toml::Value& v, const std::string& context) {
  if (!v.is_table()) throw ConfigError(context + " must be a table");
  return v.as_table();
}

std::vector<const toml::Table*> table_array(const toml::Value& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + " must be an array of tables");
  std::vector<const toml::Table*> out;
  for (const toml::Value& e : v.as_array()) {
    if (!e.is_table()) throw ConfigError(context + " must be an array of tables");
    out.push_back(&e.as_table());
  }
  return out;
}

PowerMap parse_power_map(const toml::Value& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + ": power_map must be an array of rows");
  PowerMap pm;
  for (const toml::Value& row : v.as_array()) {
    if (!row.is_array()) throw ConfigError(context + ": power_map rows must be arrays");
    if (pm.rows == 0) {
      pm.cols = static_cast<int>(row.as_array().size());
    } else if (static_cast<int>(row.as_array().size()) != pm.cols) {
      throw ConfigError(context + ": power_map rows differ in length");
    }
    for (const toml::Value& cell : row.as_array()) {
      if (!cell.is_number()) throw ConfigError(context + ": power_map cells must be numbers");
      pm.cell_w.push_back(cell.as_number());
    }
    pm.rows++;
  }
  if (pm.rows == 0 || pm.cols == 0) throw ConfigError(context + ": power_map is empty");
  return pm;
}

ArchitectureSpec build_spec(const toml::Table& root, const std::string& name) {
  ArchitectureSpec spec;
  spec.name = name;

  std::set<std::string> top_seen;
  auto top = [&](const std::string& key) -> const toml::Value* {
    auto it = root.find(key);
    if (it == root.end()) return nullptr;
    top_seen.insert(key);
    return &it->second;
  };

  if (const toml::Value* v = top("name")) {
    if (!v->is_string()) throw ConfigError("name must be a string");
    spec.name = v->as_string();
  }

  const toml::Value* pkg_v = top("package");
  if (!pkg_v) throw ConfigError("missing [package] section");
  {
    const toml::Table& pkg = as_table(*pkg_v, "[package]");
    TableReader r(pkg, "[package]");
    PackageConfig& p = spec.package;
    p.interposer_width = r.number("interposer_width_mm");
    p.interposer_height = r.number("interposer_height_mm");
    p.h_top = r.number("h_top");
    p.h_bottom = r.number_or("h_bottom", 10.0);
    p.ambient = r.number_or("ambient_c", 23.0);
    p.gravity = r.number_or("gravity", 9.81);
    p.sigma_max = r.number("sigma_max_mpa");
    p.min_spacing = r.number_or("min_spacing_mm", 0.1);
    p.bump_area_fraction = r.number_or("bump_area_fraction", 0.2);
    p.route_pitch = r.number_or("route_pitch_mm", 1.0);
    p.route_capacity = static_cast<int>(r.integer_or("route_capacity", 128));
    std::string reduction = r.string_or("stress_reduction", "peak");
    if (reduction == "peak") {
      p.stress_percentile_peak = false;
    } else if (reduction == "p99") {
      p.stress_percentile_peak = true;
    } else {
      throw ConfigError("[package]: stress_reduction must be \"peak\" or \"p99\"");
    }

    const toml::Value* layers_v = r.optional("layers");
    if (!layers_v) throw ConfigError("[package]: missing [[package.layers]]");
    for (const toml::Table* lt : table_array(*layers_v, "[[package.layers]]")) {
      TableReader lr(*lt, "[[package.layers]]");
      LayerSpec layer;
      std::string role = lr.string("role");
      std::optional<LayerRole> lrole = layer_role_from_name(role);
      if (!lrole) throw ConfigError("[[package.layers]]: unknown role '" + role + "'");
      layer.role = *lrole;
      layer.material = lr.string("material");
      layer.thickness = lr.number("thickness_um");
      layer.fill_material = lr.string_or("fill_material", "");
      lr.reject_unknown();
      p.layers.push_back(std::move(layer));
    }
    r.reject_unknown();
  }

  if (const toml::Value* mats_v = top("materials")) {
    const toml::Table& mats = as_table(*mats_v, "[materials]");
    for (const auto& [mname, mval] : mats) {
      const toml::Table& mt = as_table(mval, "[materials." + mname + "]");
      TableReader mr(mt, "[materials." + mname + "]");
      Material m;
      m.name = mname;
      m.thermal_conductivity = mr.number("thermal_conductivity");
      m.cte = mr.number("cte_ppm");
      m.youngs_modulus = mr.number("youngs_modulus_gpa");
      m.poisson_ratio = mr.number_or("poisson_ratio", 0.25);
      double rho = mr.number_or("density", 0.0);
      if (rho <= 0.0) {
        rho = default_density(mname);
        if (rho <= 0.0)
          throw ConfigError("[materials." + mname +
                            "]: density required (no default for this material class)");
      }
      m.density = rho;
      mr.reject_unknown();
      spec.materials.emplace(mname, std::move(m));
    }
  }

  const toml::Value* chips_v = top("chiplets");
  if (!chips_v) throw ConfigError("missing [[chiplets]] section");
  std::string default_chiplet_material;
  for (const LayerSpec& l : spec.package.layers)
    if (l.role == LayerRole::Chiplet) default_chiplet_material = l.material;
  for (const toml::Table* ct : table_array(*chips_v, "[[chiplets]]")) {
    TableReader cr(*ct, "[[chiplets]]");
    ChipletSpec c;
    c.name = cr.string("name");
    c.width = cr.number("width_mm");
    c.height = cr.number("height_mm");
    c.power = cr.number("power_w");
    c.thickness = cr.number_or("thickness_um", 150.0);
    c.material = cr.string_or("material", default_chiplet_material);
    if (const toml::Value* pm = cr.optional("power_map"))
      c.power_map = parse_power_map(*pm, "chiplet '" + c.name + "'");
    cr.reject_unknown();
    spec.chiplets.push_back(std::move(c));
  }

  if (const toml::Value* nets_v = top("nets")) {
    for (const toml::Table* nt : table_array(*nets_v, "[[nets]]")) {
      TableReader nr(*nt, "[[nets]]");
      Net n;
      n.src = nr.string("src");
      n.dst = nr.string("dst");
      n.wires = static_cast<int>(nr.integer("wires"));
      n.bandwidth = nr.number_or("bandwidth_gbs", 0.0);
      nr.reject_unknown();
      spec.nets.push_back(std::move(n));
    }
  }

  for (const auto& [key, value] : root)
    if (!top_seen.count(key)) throw ConfigError("unknown top-level key '" + key + "'");

  spec.validate();
  return spec;
}

} // namespace

ArchitectureSpec load_architecture(const std::string& path) {
  toml::Table root = toml::parse_file(path);
  std::string stem = std::filesystem::path(path).stem().string();
  return build_spec(root, stem);
}

ArchitectureSpec parse_architecture(const std::string& text, const std::string& name) {
  toml::Table root = toml::parse(text, name);
  return build_spec(root, name);
}

std::string save_architecture(const ArchitectureSpec& spec) {
  toml::Table root;
  root.emplace("name", toml::Value(spec.name));

  toml::Table pkg;
  const PackageConfig& p = spec.package;
  pkg.emplace("interposer_width_mm", toml::Value(p.interposer_width));
  pkg.emplace("interposer_height_mm", toml::Value(p.interposer_height));
  pkg.emplace("h_top", toml::Value(p.h_top));
  pkg.emplace("h_bottom", toml::Value(p.h_bottom));
  pkg.emplace("ambient_c", toml::Value(p.ambient));
  pkg.emplace("gravity", toml::Value(p.gravity));
  pkg.emplace("sigma_max_mpa", toml::Value(p.sigma_max));
  pkg.emplace("min_spacing_mm", toml::Value(p.min_spacing));
  pkg.emplace("bump_area_fraction", toml::Value(p.bump_area_fraction));
  pkg.emplace("route_pitch_mm", toml::Value(p.route_pitch));
  pkg.emplace("route_capacity", toml::Value(static_cast<std::int64_t>(p.route_capacity)));
  pkg.emplace("stress_reduction",
              toml::Value(std::string(p.stress_percentile_peak ? "p99" : "peak")));
  toml::Array layers;
  for (const LayerSpec& l : p.layers) {
    toml::Table lt;
    lt.emplace("role", toml::Value(std::string(layer_role_name(l.role))));
    lt.emplace("material", toml::Value(l.material));
    lt.emplace("thickness_um", toml::Value(l.thickness));
    if (!l.fill_material.empty()) lt.emplace("fill_material", toml::Value(l.fill_material));
    layers.emplace_back(std::move(lt));
  }
  pkg.emplace("layers", toml::Value(std::move(layers)));
  root.emplace("package", toml::Value(std::move(pkg)));

  toml::Table mats;
  for (const auto& [mname, m] : spec.materials) {
    toml::Table mt;
    mt.emplace("thermal_conductivity", toml::Value(m.thermal_conductivity));
    mt.emplace("cte_ppm", toml::Value(m.cte));
    mt.emplace("youngs_modulus_gpa", toml::Value(m.youngs_modulus));
    mt.emplace("poisson_ratio", toml::Value(m.poisson_ratio));
    mt.emplace("density", toml::Value(m.density));
    mats.emplace(mname, toml::Value(std::move(mt)));
  }
  root.emplace("materials", toml::Value(std::move(mats)));

  toml::Array chips;
  for (const ChipletSpec& c : spec.chiplets) {
    toml::Table ct;
    ct.emplace("name", toml::Value(c.name));
    ct.emplace("width_mm", toml::Value(c.width));
    ct.emplace("height_mm", toml::Value(c.height));
    ct.emplace("power_w", toml::Value(c.power));
    ct.emplace("thickness_um", toml::Value(c.thickness));
    ct.emplace("material", toml::Value(c.material));
    if (c.power_map) {
      toml::Array rows;
      for (int r = 0; r < c.power_map->rows; ++r) {
        toml::Array row;
        for (int j = 0; j < c.power_map->cols; ++j)
          row.emplace_back(c.power_map->cell_w[static_cast<std::size_t>(r) * c.power_map->cols + j]);
        rows.emplace_back(std::move(row));
      }
      ct.emplace("power_map", toml::Value(std::move(rows)));
    }
    chips.emplace_back(std::move(ct));
  }
  root.emplace("chiplets", toml::Value(std::move(chips)));

  if (!spec.nets.empty()) {
    toml::Array nets;
    for (const Net& n : spec.nets) {
      toml::Table nt;
      nt.emplace("src", toml::Value(n.src));
      nt.emplace("dst", toml::Value(n.dst));
      nt.emplace("wires", toml::Value(static_cast<std::int64_t>(n.wires)));
      nt.emplace("bandwidth_gbs", toml::Value(n.bandwidth));
      nets.emplace_back(std::move(nt));
    }
    root.emplace("nets", toml::Value(std::move(nets)));
  }

  return toml::serialize(root);
}

bool spec_equal(const ArchitectureSpec& a, const ArchitectureSpec& b) {
  if (a.name != b.name) return false;
  const PackageConfig &pa = a.package, &pb = b.package;
  if (pa.interposer_width != pb.interposer_width ||
      pa.interposer_height != pb.interposer_height || pa.h_top != pb.h_top ||
      pa.h_bottom != pb.h_bottom || pa.ambient != pb.ambient || pa.gravity != pb.gravity ||
      pa.sigma_max != pb.sigma_max || pa.min_spacing != pb.min_spacing ||
      pa.bump_area_fraction != pb.bump_area_fraction || pa.route_pitch != pb.route_pitch ||
      pa.route_capacity != pb.route_capacity ||
      pa.stress_percentile_peak != pb.stress_percentile_peak)
    return false;
  if (pa.layers.size() != pb.layers.size()) return false;
  for (std::size_t i = 0; i < pa.layers.size(); ++i) {
    const LayerSpec &la = pa.layers[i], &lb = pb.layers[i];
    if (la.role != lb.role || la.material != lb.material || la.thickness != lb.thickness ||
        la.fill_material != lb.fill_material)
      return false;
  }
  if (a.materials.size() != b.materials.size()) return false;
  for (const auto& [name, ma] : a.materials) {
    auto it = b.materials.find(name);
    if (it == b.materials.end()) return false;
    const Material& mb = it->second;
    if (ma.thermal_conductivity != mb.thermal_conductivity || ma.cte != mb.cte ||
        ma.youngs_modulus != mb.youngs_modulus || ma.poisson_ratio != mb.poisson_ratio ||
        ma.density != mb.density)
      return false;
  }
  if (a.chiplets.size() != b.chiplets.size()) return false;
  for (std::size_t i = 0; i < a.chiplets.size(); ++i) {
    const ChipletSpec &ca = a.chiplets[i], &cb = b.chiplets[i];
    if (ca.name != cb.name || ca.width != cb.width || ca.height != cb.height ||
        ca.power != cb.power || ca.thickness != cb.thickness || ca.material != cb.material)
      return false;
    if (ca.power_map.has_value() != cb.power_map.has_value()) return false;
    if (ca.power_map &&
        (ca.power_map->rows != cb.power_map->rows || ca.power_map->cols != cb.power_map->cols ||
         ca.power_map->cell_w != cb.power_map->cell_w))
      return false;
  }
  if (a.nets.size() != b.nets.size()) return false;
  for (std::size_t i = 0; i < a.nets.size(); ++i) {
    const Net &na = a.nets[i], &nb = b.nets[i];
    if (na.src != nb.src || na.dst != nb.dst || na.wires != nb.wires ||
        na.bandwidth != nb.bandwidth)
      return false;
  }
  return true;
}

Placement placement_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("placement JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("placement JSON must be an object");
  Placement p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& e = it.value();
    if (!e.is_object() || !e.contains("x_mm") || !e.contains("y_mm"))
      throw ConfigError("placement entry '" + it.key() + "' must have x_mm and y_mm");
    PlacedChiplet pc;
    pc.x = e.at("x_mm").get<double>();
    pc.y = e.at("y_mm").get<double>();
    int deg = e.value("rot_deg", 0);
    std::optional<Rotation> rot = rotation_from_degrees(deg);
    if (!rot)
      throw ConfigError("placement entry '" + it.key() + "': rot_deg must be 0/90/180/270");
    pc.rotation = *rot;
    p.entries[it.key()] = pc;
  }
  return p;
}

std::string placement_to_json(const Placement& p) {
  json j = json::object();
  for (const auto& [name, pc] : p.entries) {
    j[name] = {{"x_mm", pc.x}, {"y_mm", pc.y}, {"rot_deg", rotation_degrees(pc.rotation)}};
  }
  return j.dump(2) + "\n";
}

Placement load_placement(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open placement file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return placement_from_json(ss.str());
}

void save_placement(const Placement& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write placement file: " + path);
  out << placement_to_json(p);
}

} // namespace chiplet
