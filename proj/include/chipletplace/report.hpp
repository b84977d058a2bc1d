#ifndef CHIPLETPLACE_REPORT_HPP
#define CHIPLETPLACE_REPORT_HPP

// Optimization report JSON: objective, seed, schedule, normalization
// ranges, accepted-state trace, best placement/metrics and final-state
// statistics. Serialization is deterministic (sorted keys, round-trip
// float formatting); wall_clock_s is the only timing field.

#include "chipletplace/anneal.hpp"

#include <string>

namespace chiplet {

std::string report_to_json(const OptimizationReport& report);
OptimizationReport report_from_json(const std::string& text);

void save_report(const OptimizationReport& report, const std::string& path);
OptimizationReport load_report(const std::string& path);

} // namespace chiplet

#endif
