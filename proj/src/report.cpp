#include "chipletplace/report.hpp"

#include "chipletplace/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

using nlohmann::json;

namespace chiplet {

namespace {

json placement_json(const Placement& p) {
  json j = json::object();
  for (const auto& [name, pc] : p.entries)
    j[name] = {{"x_mm", pc.x}, {"y_mm", pc.y}, {"rot_deg", rotation_degrees(pc.rotation)}};
  return j;
}

Placement placement_from(const json& j) {
  Placement p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    PlacedChiplet pc;
    pc.x = it.value().at("x_mm").get<double>();
    pc.y = it.value().at("y_mm").get<double>();
    std::optional<Rotation> rot = rotation_from_degrees(it.value().at("rot_deg").get<int>());
    if (!rot) throw ConfigError("report: bad rot_deg for '" + it.key() + "'");
    pc.rotation = *rot;
    p.entries[it.key()] = pc;
  }
  return p;
}

json eval_json(const CandidateEvaluation& e) {
  return {{"peak_temp_c", e.peak_temp},
          {"peak_stress_mpa", e.peak_stress},
          {"wirelength_mm", e.wirelength}};
}

CandidateEvaluation eval_from(const json& j) {
  CandidateEvaluation e;
  e.peak_temp = j.at("peak_temp_c").get<double>();
  e.peak_stress = j.at("peak_stress_mpa").get<double>();
  e.wirelength = j.at("wirelength_mm").get<double>();
  return e;
}

} // namespace

std::string report_to_json(const OptimizationReport& r) {
  json j;
  j["schema"] = "chipletplace-report-v1";
  j["architecture"] = r.architecture;
  j["objective"] = objective_name(r.objective);
  j["seed"] = r.seed;
  j["schedule"] = {{"initial_temp", r.schedule.initial_temp},
                   {"cooling_rate", r.schedule.cooling_rate},
                   {"iters_per_level", r.schedule.iters_per_level},
                   {"stop_temp", r.schedule.stop_temp}};
  j["fidelity"] = r.hpwl_proxy ? "hpwl-proxy" : "full-route";
  j["resolution"] = r.resolution;

  json ranges;
  ranges["available"] = r.ranges.available;
  if (r.ranges.available) {
    ranges["temp"] = {r.ranges.temp.min, r.ranges.temp.max};
    ranges["stress"] = {r.ranges.stress.min, r.ranges.stress.max};
    ranges["length"] = {r.ranges.length.min, r.ranges.length.max};
  }
  ranges["fallback_sigma_max"] = r.ranges.fallback_sigma_max;
  ranges["fallback_length0"] = r.ranges.fallback_length0;
  j["ranges"] = ranges;

  j["initial"] = {{"placement", placement_json(r.initial_placement)},
                  {"metrics", eval_json(r.initial_eval)}};
  j["best"] = {{"placement", placement_json(r.best_placement)},
               {"metrics", eval_json(r.best_eval)},
               {"cost", r.best_cost}};

  json trace = json::array();
  for (const TraceEntry& t : r.trace) {
    trace.push_back({{"level", t.level},
                     {"anneal_t", t.anneal_t},
                     {"iter", t.iter},
                     {"metrics", eval_json(t.eval)},
                     {"weights", {{"a", t.weights.a}, {"b", t.weights.b}, {"c", t.weights.c}}},
                     {"cost_old", t.cost_old},
                     {"cost_new", t.cost_new},
                     {"accept_prob", t.accept_prob},
                     {"u", t.u}});
  }
  j["trace"] = trace;

  json syncs = json::array();
  for (const LevelSync& s : r.level_syncs)
    syncs.push_back({{"level", s.level},
                     {"anneal_t", s.anneal_t},
                     {"routed_wirelength_mm", s.routed_wirelength}});
  j["level_syncs"] = syncs;

  j["stats"] = {{"gradient", {{"mean", r.grad_mean}, {"std", r.grad_std}, {"max", r.grad_max}}},
                {"correlations",
                 {{"ts", r.ts_corr}, {"gs", r.gs_corr}, {"defined", r.correlations_defined}}}};
  j["evaluations"] = r.evaluations;
  j["wall_clock_s"] = r.wall_clock_s;
  return j.dump(2) + "\n";
}

OptimizationReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report JSON parse error: ") + e.what());
  }
  OptimizationReport r;
  try {
    r.architecture = j.at("architecture").get<std::string>();
    std::optional<Objective> obj = objective_from_name(j.at("objective").get<std::string>());
    if (!obj) throw ConfigError("report: unknown objective");
    r.objective = *obj;
    r.seed = j.at("seed").get<std::uint64_t>();
    const json& sched = j.at("schedule");
    r.schedule.initial_temp = sched.at("initial_temp").get<double>();
    r.schedule.cooling_rate = sched.at("cooling_rate").get<double>();
    r.schedule.iters_per_level = sched.at("iters_per_level").get<int>();
    r.schedule.stop_temp = sched.at("stop_temp").get<double>();
    r.hpwl_proxy = j.at("fidelity").get<std::string>() == "hpwl-proxy";
    r.resolution = j.at("resolution").get<double>();

    const json& ranges = j.at("ranges");
    r.ranges.available = ranges.at("available").get<bool>();
    if (r.ranges.available) {
      r.ranges.temp = {ranges.at("temp")[0].get<double>(), ranges.at("temp")[1].get<double>()};
      r.ranges.stress = {ranges.at("stress")[0].get<double>(),
                         ranges.at("stress")[1].get<double>()};
      r.ranges.length = {ranges.at("length")[0].get<double>(),
                         ranges.at("length")[1].get<double>()};
    }
    r.ranges.fallback_sigma_max = ranges.at("fallback_sigma_max").get<double>();
    r.ranges.fallback_length0 = ranges.at("fallback_length0").get<double>();

    r.initial_placement = placement_from(j.at("initial").at("placement"));
    r.initial_eval = eval_from(j.at("initial").at("metrics"));
    r.best_placement = placement_from(j.at("best").at("placement"));
    r.best_eval = eval_from(j.at("best").at("metrics"));
    r.best_cost = j.at("best").at("cost").get<double>();

    for (const json& t : j.at("trace")) {
      TraceEntry e;
      e.level = t.at("level").get<int>();
      e.anneal_t = t.at("anneal_t").get<double>();
      e.iter = t.at("iter").get<int>();
      e.eval = eval_from(t.at("metrics"));
      e.weights.a = t.at("weights").at("a").get<double>();
      e.weights.b = t.at("weights").at("b").get<double>();
      e.weights.c = t.at("weights").at("c").get<double>();
      e.cost_old = t.at("cost_old").get<double>();
      e.cost_new = t.at("cost_new").get<double>();
      e.accept_prob = t.at("accept_prob").get<double>();
      e.u = t.at("u").get<double>();
      r.trace.push_back(e);
    }
    for (const json& s : j.at("level_syncs")) {
      LevelSync sync;
      sync.level = s.at("level").get<int>();
      sync.anneal_t = s.at("anneal_t").get<double>();
      sync.routed_wirelength = s.at("routed_wirelength_mm").get<double>();
      r.level_syncs.push_back(sync);
    }
    const json& stats = j.at("stats");
    r.grad_mean = stats.at("gradient").at("mean").get<double>();
    r.grad_std = stats.at("gradient").at("std").get<double>();
    r.grad_max = stats.at("gradient").at("max").get<double>();
    r.ts_corr = stats.at("correlations").at("ts").get<double>();
    r.gs_corr = stats.at("correlations").at("gs").get<double>();
    r.correlations_defined = stats.at("correlations").at("defined").get<bool>();
    r.evaluations = j.at("evaluations").get<long>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

void save_report(const OptimizationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report: " + path);
  out << report_to_json(report);
}

OptimizationReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open report: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

} // namespace chiplet
