#ifndef CHIPLETPLACE_CONFIG_HPP
#define CHIPLETPLACE_CONFIG_HPP

// Architecture config ingestion. One TOML file per architecture with
// sections [package] (+ [[package.layers]]), [materials.<name>],
// [[chiplets]] and [[nets]]. Unknown keys are rejected.

#include "chipletplace/model.hpp"

#include <string>

namespace chiplet {

// Loads, resolves defaults and fully validates an architecture.
// Throws ConfigError on parse/schema problems, ValidationError on
// violated invariants.
ArchitectureSpec load_architecture(const std::string& path);

// Parses from an in-memory string (tests, round-trips).
ArchitectureSpec parse_architecture(const std::string& text, const std::string& name);

// Serializes a spec back to config text; load(save(s)) == s field by field.
std::string save_architecture(const ArchitectureSpec& spec);

// Placement interchange: JSON map name -> {x_mm, y_mm, rot_deg}.
Placement load_placement(const std::string& path);
std::string placement_to_json(const Placement& p);
Placement placement_from_json(const std::string& text);
void save_placement(const Placement& p, const std::string& path);

bool spec_equal(const ArchitectureSpec& a, const ArchitectureSpec& b);

} // namespace chiplet

#endif
