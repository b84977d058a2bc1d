#include "chipletplace/cli.hpp"

#include "chipletplace/config.hpp"
#include "chipletplace/error.hpp"
#include "chipletplace/fields.hpp"
#include "chipletplace/metrics.hpp"
#include "chipletplace/pipeline.hpp"
#include "chipletplace/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace chiplet {

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct RunArgs {
  std::string config;
  std::string objective = "wst";
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
  double resolution = 1.0;
  std::string fidelity = "full-route";
  double pitch = 0.0;
  int capacity = 0;
  int iters_per_level = 0; // 0 = config/architecture default
  double initial_temp = 1.0;
  double cooling_rate = 0.9;
  double stop_temp = 0.01;
  int warmup = 30;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    std::uint64_t lo = std::stoull(text.substr(0, range_pos));
    std::uint64_t hi = std::stoull(text.substr(range_pos + 2));
    if (hi < lo) throw CLI::ValidationError("--seeds", "range end below start");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) seeds.push_back(std::stoull(item));
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
  return seeds;
}

void export_solution(const PipelineEvaluator::FullSolution& sol, const fs::path& dir) {
  fs::create_directories(dir);
  write_field_csv(sol.temperature, (dir / "temperature.csv").string());
  write_field_csv(sol.stress.field, (dir / "stress_vm.csv").string());
  int plane = sol.grid.interposer_z_top;
  write_field_pgm(sol.temperature, plane, (dir / "temperature_interposer_top.pgm").string());
  write_field_pgm(sol.stress.field, plane, (dir / "stress_vm_interposer_top.pgm").string());
  ScalarField grad = sol.grad_plane;
  write_field_csv(grad, (dir / "gradient_interposer_top.csv").string());
  if (!sol.route.nets.empty()) write_route_csv(sol.route, (dir / "route.csv").string());
}

void print_metrics(std::ostream& os, const PipelineEvaluator::FullSolution& sol) {
  os << "peak_temp_c        " << sol.eval.peak_temp << "\n";
  os << "peak_stress_mpa    " << sol.eval.peak_stress << "\n";
  os << "wirelength_mm      " << sol.eval.wirelength << "\n";
  os << "grad_mean_c_per_mm " << sol.grad.mean << "\n";
  os << "grad_std_c_per_mm  " << sol.grad.stddev << "\n";
  os << "grad_max_c_per_mm  " << sol.grad.max << "\n";
  if (sol.correlations_defined) {
    os << "ts_corr            " << sol.correlations.ts << "\n";
    os << "gs_corr            " << sol.correlations.gs << "\n";
  } else {
    os << "ts_corr            n/a (constant field)\n";
    os << "gs_corr            n/a (constant field)\n";
  }
}

int default_iters_per_level(const ArchitectureSpec& spec) {
  // 45 for the 45 mm package, 50 for the rest
  return spec.package.interposer_width < 50.0 ? 45 : 50;
}

OptimizationReport run_one_seed(const ArchitectureSpec& spec, Objective objective,
                                AnnealSchedule sched, std::uint64_t seed,
                                const RunArgs& args) {
  PipelineOptions popts;
  popts.resolution = args.resolution;
  popts.pitch = args.pitch;
  popts.capacity = args.capacity;
  PipelineEvaluator pipeline(spec, popts);

  AnnealOptions aopts;
  aopts.warmup_samples = args.warmup;
  aopts.hpwl_proxy = args.fidelity == "hpwl-proxy";

  auto t0 = std::chrono::steady_clock::now();
  OptimizationReport report =
      anneal(spec, objective, sched, seed, pipeline.as_eval_fn(), aopts);
  report.resolution = args.resolution;

  PipelineEvaluator::FullSolution sol = pipeline.solve_full(report.best_placement);
  report.best_eval = sol.eval;
  report.grad_mean = sol.grad.mean;
  report.grad_std = sol.grad.stddev;
  report.grad_max = sol.grad.max;
  report.correlations_defined = sol.correlations_defined;
  if (sol.correlations_defined) {
    report.ts_corr = sol.correlations.ts;
    report.gs_corr = sol.correlations.gs;
  }
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::path seed_dir = fs::path(args.out_dir) / ("seed_" + std::to_string(seed));
  export_solution(sol, seed_dir);
  save_report(report, (seed_dir / "report.json").string());
  save_placement(report.best_placement, (seed_dir / "placement.json").string());
  return report;
}

int cmd_run(const RunArgs& args) {
  ArchitectureSpec spec = load_architecture(args.config);
  std::optional<Objective> objective = objective_from_name(args.objective);
  if (!objective) {
    std::cerr << "error: unknown objective '" << args.objective << "' (wt|ws|wst)\n";
    return kExitUsage;
  }

  AnnealSchedule sched;
  sched.initial_temp = args.initial_temp;
  sched.cooling_rate = args.cooling_rate;
  sched.stop_temp = args.stop_temp;
  sched.iters_per_level =
      args.iters_per_level > 0 ? args.iters_per_level : default_iters_per_level(spec);

  fs::create_directories(args.out_dir);

  // independent chains, one per seed
  std::vector<std::future<OptimizationReport>> futures;
  for (std::uint64_t seed : args.seeds)
    futures.push_back(std::async(std::launch::async, [&, seed] {
      return run_one_seed(spec, *objective, sched, seed, args);
    }));

  for (std::size_t i = 0; i < futures.size(); ++i) {
    OptimizationReport report = futures[i].get();
    std::cout << "seed " << args.seeds[i] << ": best cost " << report.best_cost
              << ", peak T " << report.best_eval.peak_temp << " C, peak stress "
              << report.best_eval.peak_stress << " MPa, wirelength "
              << report.best_eval.wirelength << " mm (" << report.evaluations
              << " evaluations, " << report.wall_clock_s << " s)\n";
  }
  return 0;
}

int cmd_eval(const std::string& config, const std::string& placement_path,
             const std::string& out_dir, double resolution, double pitch, int capacity) {
  ArchitectureSpec spec = load_architecture(config);
  Placement p = load_placement(placement_path);

  FeasibilityVerdict verdict = validate_placement(p, spec);
  if (!verdict.ok()) {
    std::cerr << "infeasible placement:\n";
    for (const PlacementViolation& v : verdict.violations)
      std::cerr << "  - " << v.message << "\n";
    return kExitValidation;
  }

  PipelineOptions popts;
  popts.resolution = resolution;
  popts.pitch = pitch;
  popts.capacity = capacity;
  PipelineEvaluator pipeline(spec, popts);
  PipelineEvaluator::FullSolution sol = pipeline.solve_full(p);
  print_metrics(std::cout, sol);
  if (!out_dir.empty()) export_solution(sol, out_dir);
  return 0;
}

int cmd_route(const std::string& config, const std::string& placement_path,
              std::uint64_t seed, const std::string& out_path, double pitch, int capacity) {
  ArchitectureSpec spec = load_architecture(config);
  Placement p = placement_path.empty() ? initial_placement(spec, seed)
                                       : load_placement(placement_path);
  FeasibilityVerdict verdict = validate_placement(p, spec);
  if (!verdict.ok()) {
    std::cerr << "infeasible placement: " << verdict.violations.front().message << "\n";
    return kExitValidation;
  }
  double use_pitch = pitch > 0.0 ? pitch : spec.package.route_pitch;
  int use_capacity = capacity > 0 ? capacity : spec.package.route_capacity;
  RoutingGraph rg = build_routing_graph(spec, p, use_pitch, use_capacity);
  RouteResult result = route_nets(rg, spec.nets);
  std::cout << "total_wirelength_mm " << result.total_wirelength << "\n";
  std::cout << "feasible            " << (result.feasible ? "yes" : "no") << "\n";
  for (const NetRoute& nr : result.nets)
    std::cout << "net " << nr.src << "->" << nr.dst << ": " << nr.wires_routed << "/"
              << nr.wires << " wires, " << nr.length << " mm\n";
  if (!out_path.empty()) write_route_csv(result, out_path);
  if (!result.feasible) {
    std::cerr << "error: routing capacity exhausted\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& csv_path) {
  std::vector<OptimizationReport> reports;
  for (const std::string& path : report_paths) reports.push_back(load_report(path));
  RunComparison cmp = compare_runs(reports);
  std::cout << comparison_table(cmp);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write " + csv_path);
    out << comparison_csv(cmp);
  }
  return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Thermal, stress and wirelength aware chiplet placement for 2.5D packages"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::string seeds_text;
  CLI::App* run = app.add_subcommand("run", "Optimize a placement with simulated annealing");
  run->add_option("--config", run_args.config, "architecture config (TOML)")->required();
  run->add_option("--objective", run_args.objective, "objective mode: wt|ws|wst");
  run->add_option("--seed", seeds_text, "seed, list (1,2,3) or range (1..5)");
  run->add_option("--seeds", seeds_text, "alias of --seed");
  run->add_option("--out", run_args.out_dir, "output directory");
  run->add_option("--resolution", run_args.resolution, "lateral cells per mm");
  run->add_option("--fidelity", run_args.fidelity,
                  "evaluation fidelity: full-route|hpwl-proxy")
      ->check(CLI::IsMember({"full-route", "hpwl-proxy"}));
  run->add_option("--pitch", run_args.pitch, "routing pitch (mm)");
  run->add_option("--capacity", run_args.capacity, "routing capacity (wires/edge)");
  run->add_option("--iters", run_args.iters_per_level, "iterations per annealing level");
  run->add_option("--initial-temp", run_args.initial_temp, "initial annealing temperature");
  run->add_option("--cooling", run_args.cooling_rate, "cooling rate");
  run->add_option("--stop-temp", run_args.stop_temp, "stop temperature");
  run->add_option("--warmup", run_args.warmup, "normalization warm-up samples");

  std::string eval_config, eval_placement, eval_out;
  double eval_resolution = 1.0, eval_pitch = 0.0;
  int eval_capacity = 0;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate one placement");
  eval->add_option("--config", eval_config, "architecture config (TOML)")->required();
  eval->add_option("--placement", eval_placement, "placement JSON")->required();
  eval->add_option("--out", eval_out, "export field files to this directory");
  eval->add_option("--resolution", eval_resolution, "lateral cells per mm");
  eval->add_option("--pitch", eval_pitch, "routing pitch (mm)");
  eval->add_option("--capacity", eval_capacity, "routing capacity (wires/edge)");

  std::string route_config, route_placement, route_out;
  std::uint64_t route_seed = 1;
  double route_pitch = 0.0;
  int route_capacity = 0;
  CLI::App* route = app.add_subcommand("route", "Route all nets for a placement");
  route->add_option("--config", route_config, "architecture config (TOML)")->required();
  route->add_option("--placement", route_placement,
                    "placement JSON (default: initial placement)");
  route->add_option("--seed", route_seed, "seed for the default initial placement");
  route->add_option("--out", route_out, "route dump CSV path");
  route->add_option("--pitch", route_pitch, "routing pitch (mm)");
  route->add_option("--capacity", route_capacity, "routing capacity (wires/edge)");

  std::vector<std::string> compare_paths;
  std::string compare_csv_path;
  CLI::App* compare = app.add_subcommand("compare", "Compare run reports");
  compare->add_option("reports", compare_paths, "report JSON files")->expected(-2);
  compare->add_option("--csv", compare_csv_path, "write the comparison as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      if (!seeds_text.empty()) run_args.seeds = parse_seed_list(seeds_text);
      return cmd_run(run_args);
    }
    if (eval->parsed())
      return cmd_eval(eval_config, eval_placement, eval_out, eval_resolution, eval_pitch,
                      eval_capacity);
    if (route->parsed())
      return cmd_route(route_config, route_placement, route_seed, route_out, route_pitch,
                       route_capacity);
    if (compare->parsed()) return cmd_compare(compare_paths, compare_csv_path);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

} // namespace chiplet
