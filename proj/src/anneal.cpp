#include "chipletplace/anneal.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>

namespace chiplet {

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::WT: return "wt";
    case Objective::WS: return "ws";
    case Objective::WST: return "wst";
  }
  return "?";
}

std::optional<Objective> objective_from_name(const std::string& name) {
  if (name == "wt") return Objective::WT;
  if (name == "ws") return Objective::WS;
  if (name == "wst") return Objective::WST;
  return std::nullopt;
}

double temperature_weight(double t_old, double t_new) {
  double t = std::max(t_old, t_new);
  if (t < 75.0) return 0.0;
  double base = std::min(0.1 + 0.01 * (t - 23.0), 0.5);
  double a = base * (t - 60.0) / 40.0;
  return std::clamp(a, 0.0, 0.5);
}

double stress_weight(double s_old, double s_new, double s_max) {
  if (!(s_max > 0.0)) throw ValidationError("stress_weight requires s_max > 0");
  double ratio = std::max(s_old, s_new) / s_max;
  return std::min(0.1 + 0.5 * std::pow(ratio, 1.5), 0.5);
}

double length_weight(double a, double b) { return std::abs(1.0 - a - b); }

CostWeights adaptive_weights(const CandidateEvaluation& current,
                             const CandidateEvaluation& candidate, double sigma_max,
                             Objective mode) {
  CostWeights w;
  switch (mode) {
    case Objective::WT:
      w.a = temperature_weight(current.peak_temp, candidate.peak_temp);
      w.b = 0.0;
      break;
    case Objective::WS:
      w.a = 0.0;
      w.b = stress_weight(current.peak_stress, candidate.peak_stress, sigma_max);
      break;
    case Objective::WST:
      w.a = temperature_weight(current.peak_temp, candidate.peak_temp);
      w.b = stress_weight(current.peak_stress, candidate.peak_stress, sigma_max);
      break;
  }
  w.c = length_weight(w.a, w.b);
  return w;
}

namespace {

double norm_term(double x, const MetricRange& r) {
  if (!(r.max > r.min)) return 0.0; // degenerate range contributes nothing
  double clamped = std::clamp(x, r.min, r.max);
  return (clamped - r.min) / (r.max - r.min);
}

} // namespace

double cost(const CandidateEvaluation& e, const CostWeights& w, const NormalizationRanges& r) {
  if (r.available) {
    return w.a * norm_term(e.peak_temp, r.temp) + w.b * norm_term(e.peak_stress, r.stress) +
           w.c * norm_term(e.wirelength, r.length);
  }
  double t_term = e.peak_temp / 100.0;
  double s_term = r.fallback_sigma_max > 0.0 ? e.peak_stress / r.fallback_sigma_max : 0.0;
  double l_term = r.fallback_length0 > 0.0 ? e.wirelength / r.fallback_length0 : 0.0;
  return w.a * t_term + w.b * s_term + w.c * l_term;
}

bool acceptance(double old_cost, double new_cost, double anneal_t, double u) {
  double delta = -(new_cost - old_cost);
  if (delta > 0.0) return true;
  return u < std::exp(delta / anneal_t);
}

double acceptance_probability(double old_cost, double new_cost, double anneal_t) {
  double delta = -(new_cost - old_cost);
  if (delta > 0.0) return 1.0;
  return std::exp(delta / anneal_t);
}

int AnnealSchedule::level_count() const {
  int n = 0;
  for (double t = initial_temp; t > stop_temp; t *= cooling_rate) ++n;
  return n;
}

Placement perturb(const Placement& p, const ArchitectureSpec& spec, SplitMix64& rng,
                  const MoveConfig& cfg, double anneal_t, MoveOutcome* outcome) {
  const std::size_t n = spec.chiplets.size();
  const double width = spec.package.interposer_width;
  const double height = spec.package.interposer_height;
  const double sigma = std::max(cfg.step_floor, cfg.step_scale * width * anneal_t);

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    double pick = rng.uniform();
    MoveKind kind;
    if (pick < cfg.translate_prob) {
      kind = MoveKind::Translate;
    } else if (pick < cfg.translate_prob + cfg.rotate_prob) {
      kind = MoveKind::Rotate;
    } else {
      kind = MoveKind::Swap;
    }
    if (kind == MoveKind::Swap && n < 2) kind = MoveKind::Translate;

    Placement cand = p;
    switch (kind) {
      case MoveKind::Translate: {
        const ChipletSpec& c = spec.chiplets[rng.below(n)];
        PlacedChiplet& pc = cand.entries.at(c.name);
        pc.x = std::clamp(pc.x + rng.gauss() * sigma, 0.0, width);
        pc.y = std::clamp(pc.y + rng.gauss() * sigma, 0.0, height);
        break;
      }
      case MoveKind::Rotate: {
        const ChipletSpec& c = spec.chiplets[rng.below(n)];
        PlacedChiplet& pc = cand.entries.at(c.name);
        pc.rotation = static_cast<Rotation>((static_cast<int>(pc.rotation) + 1) % 4);
        break;
      }
      case MoveKind::Swap: {
        std::size_t i = rng.below(n);
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        PlacedChiplet& pi = cand.entries.at(spec.chiplets[i].name);
        PlacedChiplet& pj = cand.entries.at(spec.chiplets[j].name);
        std::swap(pi.x, pj.x);
        std::swap(pi.y, pj.y);
        break;
      }
      case MoveKind::None: break;
    }

    if (validate_placement(cand, spec).ok()) {
      if (outcome) *outcome = MoveOutcome{kind, true};
      return cand;
    }
  }
  if (outcome) *outcome = MoveOutcome{MoveKind::None, false};
  return p;
}

OptimizationReport anneal(const ArchitectureSpec& spec, Objective objective,
                          const AnnealSchedule& schedule, std::uint64_t seed,
                          const EvalFn& eval, const AnnealOptions& opts) {
  if (!(schedule.cooling_rate > 0.0 && schedule.cooling_rate < 1.0))
    throw ValidationError("cooling_rate must be in (0, 1)");
  if (!(schedule.stop_temp < schedule.initial_temp))
    throw ValidationError("stop_temp must be below initial_temp");

  OptimizationReport report;
  report.architecture = spec.name;
  report.objective = objective;
  report.seed = seed;
  report.schedule = schedule;
  report.hpwl_proxy = opts.hpwl_proxy;

  SplitMix64 root(seed);
  SplitMix64 warmup_rng = root.split(2);
  SplitMix64 chain_rng = root.split(3);

  const bool inner_full = !opts.hpwl_proxy;

  Placement current = initial_placement(spec, seed);
  CandidateEvaluation current_eval = eval(current, inner_full);
  report.evaluations++;
  report.initial_placement = current;
  report.initial_eval = current_eval;

  NormalizationRanges ranges;
  ranges.fallback_sigma_max = spec.package.sigma_max;
  ranges.fallback_length0 = current_eval.wirelength;
  if (opts.warmup_samples > 0) {
    ranges.available = true;
    bool first = true;
    for (int i = 0; i < opts.warmup_samples; ++i) {
      Placement sample = random_placement(spec, warmup_rng);
      CandidateEvaluation e = eval(sample, inner_full);
      report.evaluations++;
      if (first) {
        ranges.temp = {e.peak_temp, e.peak_temp};
        ranges.stress = {e.peak_stress, e.peak_stress};
        ranges.length = {e.wirelength, e.wirelength};
        first = false;
      } else {
        ranges.temp.min = std::min(ranges.temp.min, e.peak_temp);
        ranges.temp.max = std::max(ranges.temp.max, e.peak_temp);
        ranges.stress.min = std::min(ranges.stress.min, e.peak_stress);
        ranges.stress.max = std::max(ranges.stress.max, e.peak_stress);
        ranges.length.min = std::min(ranges.length.min, e.wirelength);
        ranges.length.max = std::max(ranges.length.max, e.wirelength);
      }
    }
  }
  report.ranges = ranges;

  // the initial state is the first trace entry
  {
    CostWeights w0 = adaptive_weights(current_eval, current_eval, spec.package.sigma_max,
                                      objective);
    double c0 = cost(current_eval, w0, ranges);
    report.trace.push_back(TraceEntry{0, schedule.initial_temp, -1, current_eval, w0, c0, c0,
                                      1.0, 0.0});
    report.best_placement = current;
    report.best_eval = current_eval;
    report.best_cost = c0;
  }

  int level = 0;
  for (double t = schedule.initial_temp; t > schedule.stop_temp;
       t *= schedule.cooling_rate, ++level) {
    for (int iter = 0; iter < schedule.iters_per_level; ++iter) {
      MoveOutcome mv;
      Placement candidate = perturb(current, spec, chain_rng, opts.moves, t, &mv);
      double u = chain_rng.uniform();
      if (!mv.feasible) continue; // no feasible move found; state unchanged

      CandidateEvaluation cand_eval = eval(candidate, inner_full);
      report.evaluations++;
      CostWeights w = adaptive_weights(current_eval, cand_eval, spec.package.sigma_max,
                                       objective);
      double old_cost = cost(current_eval, w, ranges);
      double new_cost = cost(cand_eval, w, ranges);
      if (acceptance(old_cost, new_cost, t, u)) {
        current = std::move(candidate);
        current_eval = cand_eval;
        report.trace.push_back(TraceEntry{level, t, iter, cand_eval, w, old_cost, new_cost,
                                          acceptance_probability(old_cost, new_cost, t), u});
        if (new_cost < report.best_cost) {
          report.best_cost = new_cost;
          report.best_placement = current;
          report.best_eval = cand_eval;
        }
      }
    }
    if (opts.hpwl_proxy) {
      // level-boundary full route of the accepted state; diagnostic only,
      // decisions stay on the proxy scale the ranges were sampled with
      CandidateEvaluation synced = eval(current, true);
      report.evaluations++;
      report.level_syncs.push_back(LevelSync{level, t, synced.wirelength});
    }
  }

  if (opts.hpwl_proxy) {
    // report the best state with routed wirelength
    CandidateEvaluation full = eval(report.best_placement, true);
    report.evaluations++;
    report.best_eval.wirelength = full.wirelength;
  }
  return report;
}

} // namespace chiplet
