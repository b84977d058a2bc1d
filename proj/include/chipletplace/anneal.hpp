#ifndef CHIPLETPLACE_ANNEAL_HPP
#define CHIPLETPLACE_ANNEAL_HPP

// Adaptive-weight simulated annealing over placements. Weights react to
// the current and candidate evaluations: the temperature weight activates
// at 75 degC and saturates at 0.5, the stress weight has a 0.1 floor and a
// superlinear (1.5 exponent) approach to its 0.5 cap, and the wirelength
// weight takes up the residual |1 - a - b|. Objective modes WT/WS mask the
// absent term. Candidates are accepted by the Boltzmann criterion on the
// normalized weighted cost.

#include "chipletplace/model.hpp"
#include "chipletplace/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chiplet {

enum class Objective { WT, WS, WST };

const char* objective_name(Objective o);
std::optional<Objective> objective_from_name(const std::string& name);

// Temperature weight a: zero below the 75 degC gate, then
// min(0.1 + 0.01*(maxT - 23), 0.5) * (maxT - 60)/40, clamped to [0, 0.5].
double temperature_weight(double t_old, double t_new);

// Stress weight b: min(0.1 + 0.5*(maxS/s_max)^1.5, 0.5). Throws when
// s_max <= 0.
double stress_weight(double s_old, double s_new, double s_max);

// Residual length weight c = |1 - a - b|.
double length_weight(double a, double b);

struct CostWeights {
  double a = 0.0; // temperature
  double b = 0.0; // stress
  double c = 1.0; // wirelength
};

// Weights for one transition under the given objective mode; masked terms
// contribute zero weight and their metric never influences the decision.
CostWeights adaptive_weights(const CandidateEvaluation& current,
                             const CandidateEvaluation& candidate, double sigma_max,
                             Objective mode);

struct MetricRange {
  double min = 0.0;
  double max = 0.0;
};

struct NormalizationRanges {
  bool available = false;
  MetricRange temp, stress, length;
  // linear fallback scales used when no ranges were sampled
  double fallback_sigma_max = 0.0;
  double fallback_length0 = 0.0;
};

// Weighted sum of normalized metrics; metrics are clamped into their
// range, a degenerate range (max == min) contributes zero. Without ranges
// the linear fallback a*(T/100) + b*(s/sigma_max) + c*(L/L0) is used.
double cost(const CandidateEvaluation& e, const CostWeights& w, const NormalizationRanges& r);

// Boltzmann acceptance on delta = -(new_cost - old_cost): improvements are
// always taken, otherwise accept iff u < exp(delta / anneal_t).
bool acceptance(double old_cost, double new_cost, double anneal_t, double u);

// exp(delta / anneal_t) clamped to [0, 1]; the probability logged in traces.
double acceptance_probability(double old_cost, double new_cost, double anneal_t);

struct AnnealSchedule {
  double initial_temp = 1.0;
  double cooling_rate = 0.9;
  int iters_per_level = 50;
  double stop_temp = 0.01;

  int level_count() const; // number of levels with T > stop_temp
};

enum class MoveKind { Translate, Rotate, Swap, None };

struct MoveConfig {
  double translate_prob = 0.6;
  double rotate_prob = 0.2; // remainder is swap
  double step_scale = 0.25; // sigma = step_scale * interposer_width * anneal_t
  double step_floor = 0.5;  // mm
  int max_retries = 64;
};

struct MoveOutcome {
  MoveKind kind = MoveKind::None;
  bool feasible = false;
};

// One random feasible move (translate / rotate 90 / swap); resamples up to
// max_retries and returns the input placement unchanged if none succeeds.
Placement perturb(const Placement& p, const ArchitectureSpec& spec, SplitMix64& rng,
                  const MoveConfig& cfg, double anneal_t, MoveOutcome* outcome = nullptr);

struct TraceEntry {
  int level = 0;
  double anneal_t = 0.0;
  int iter = 0; // -1 for the initial state
  CandidateEvaluation eval;
  CostWeights weights;
  double cost_old = 0.0;
  double cost_new = 0.0;
  double accept_prob = 1.0;
  double u = 0.0;
};

struct LevelSync {
  int level = 0;
  double anneal_t = 0.0;
  double routed_wirelength = 0.0; // full route of the accepted state
};

struct OptimizationReport {
  std::string architecture;
  Objective objective = Objective::WST;
  std::uint64_t seed = 0;
  AnnealSchedule schedule;
  bool hpwl_proxy = false;
  double resolution = 1.0;
  NormalizationRanges ranges;
  Placement initial_placement;
  CandidateEvaluation initial_eval;
  Placement best_placement;
  CandidateEvaluation best_eval;
  double best_cost = 0.0;
  std::vector<TraceEntry> trace; // accepted states only
  std::vector<LevelSync> level_syncs;
  long evaluations = 0;
  // final-state analysis, filled by the run driver
  double grad_mean = 0.0, grad_std = 0.0, grad_max = 0.0;
  double ts_corr = 0.0, gs_corr = 0.0;
  bool correlations_defined = false;
  double wall_clock_s = 0.0;
};

// Candidate evaluation callback; full_route distinguishes routed wirelength
// from the HPWL proxy used in inner iterations.
using EvalFn = std::function<CandidateEvaluation(const Placement&, bool full_route)>;

struct AnnealOptions {
  int warmup_samples = 30; // 0 disables normalization (linear fallback)
  bool hpwl_proxy = false;
  MoveConfig moves;
};

// Runs the full annealing loop; deterministic for a fixed seed.
OptimizationReport anneal(const ArchitectureSpec& spec, Objective objective,
                          const AnnealSchedule& schedule, std::uint64_t seed,
                          const EvalFn& eval, const AnnealOptions& opts = {});

} // namespace chiplet

#endif
