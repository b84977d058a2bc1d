#include <doctest.h>

#include "chipletplace/anneal.hpp"
#include "chipletplace/error.hpp"
#include "chipletplace/report.hpp"
#include "chipletplace/router.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace chiplet;
using namespace test_helpers;

namespace {

// cheap deterministic placement-dependent backend for loop tests
EvalFn fake_backend(const ArchitectureSpec& spec) {
  return [&spec](const Placement& p, bool) {
    CandidateEvaluation e;
    double crowd = 0.0;
    for (const auto& [name, pc] : p.entries) {
      double dx = pc.x - spec.package.interposer_width / 2.0;
      double dy = pc.y - spec.package.interposer_height / 2.0;
      crowd += std::exp(-(dx * dx + dy * dy) / 50.0);
    }
    e.peak_temp = 70.0 + 10.0 * crowd;
    const PlacedChiplet& a = p.entries.begin()->second;
    e.peak_stress = 20.0 + a.x + 0.5 * a.y;
    e.wirelength = hpwl_estimate(p, spec.nets);
    return e;
  };
}

ArchitectureSpec loop_spec() {
  return make_spec(30, 30,
                   {{"a", 6, 6, 5.0}, {"b", 5, 5, 3.0}, {"c", 4, 4, 2.0}},
                   {Net{"a", "b", 8, 0.0}, Net{"b", "c", 4, 0.0}});
}

} // namespace

TEST_SUITE("anneal") {

TEST_CASE("temperature weight: gate, scaling and cap") {
  CHECK(temperature_weight(70.0, 72.0) == 0.0);
  CHECK(temperature_weight(23.0, 23.0) == 0.0);
  CHECK(temperature_weight(74.999, 74.999) == 0.0);
  // (82, 78): min(0.69, 0.5) * 22/40 = 0.275
  CHECK(temperature_weight(82.0, 78.0) == doctest::Approx(0.275).epsilon(1e-12));
  // (100, 90): 0.5 * 40/40 = 0.5
  CHECK(temperature_weight(100.0, 90.0) == doctest::Approx(0.5).epsilon(1e-12));
  // order of arguments is irrelevant
  CHECK(temperature_weight(78.0, 82.0) == temperature_weight(82.0, 78.0));
  // beyond 100 C the clamp holds the cap
  CHECK(temperature_weight(130.0, 20.0) == 0.5);
}

TEST_CASE("temperature weight is non-decreasing on [75, 100]") {
  double prev = temperature_weight(75.0, 0.0);
  for (double t = 75.0; t <= 100.0; t += 0.25) {
    double a = temperature_weight(t, 0.0);
    CHECK(a >= prev - 1e-15);
    CHECK(a >= 0.0);
    CHECK(a <= 0.5);
    prev = a;
  }
}

TEST_CASE("stress weight: floor, curve and cap") {
  CHECK(stress_weight(0.0, 0.0, 400.0) == doctest::Approx(0.1).epsilon(1e-12));
  // (200, 150, 400): 0.1 + 0.5 * 0.5^1.5
  CHECK(stress_weight(200.0, 150.0, 400.0) ==
        doctest::Approx(0.1 + 0.5 * 0.5 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(stress_weight(400.0, 400.0, 400.0) == 0.5);
  CHECK_THROWS_AS(stress_weight(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("stress weight is non-decreasing with non-negative second difference") {
  const double s_max = 400.0;
  const double h = 2.0;
  double prev = stress_weight(0.0, 0.0, s_max);
  for (double s = 0.0; s + 2 * h <= 280.0; s += h) { // stays below the cap
    double b0 = stress_weight(s, 0.0, s_max);
    double b1 = stress_weight(s + h, 0.0, s_max);
    double b2 = stress_weight(s + 2 * h, 0.0, s_max);
    CHECK(b0 >= prev - 1e-15);
    CHECK(b2 - 2 * b1 + b0 >= -1e-12);
    prev = b0;
  }
}

TEST_CASE("length weight is the residual") {
  CHECK(length_weight(0.5, 0.5) == 0.0);
  CHECK(length_weight(0.0, 0.1) == doctest::Approx(0.9).epsilon(1e-12));
  double b = 0.1 + 0.5 * 0.5 * std::sqrt(0.5);
  CHECK(length_weight(0.275, b) == doctest::Approx(1.0 - 0.275 - b).epsilon(1e-12));
}

TEST_CASE("normalized cost: extremes and mixed point") {
  NormalizationRanges r;
  r.available = true;
  r.temp = {60.0, 100.0};
  r.stress = {10.0, 50.0};
  r.length = {100.0, 500.0};
  CostWeights w{0.5, 0.1, 0.4};

  CandidateEvaluation at_min{60.0, 10.0, 100.0};
  CHECK(cost(at_min, w, r) == 0.0);
  CandidateEvaluation at_max{100.0, 50.0, 500.0};
  CHECK(cost(at_max, w, r) == doctest::Approx(1.0).epsilon(1e-12)); // a + b + c
  CandidateEvaluation mixed{80.0, 10.0, 500.0};
  CHECK(cost(mixed, w, r) == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("degenerate range contributes zero") {
  NormalizationRanges r;
  r.available = true;
  r.temp = {80.0, 80.0};
  r.stress = {10.0, 50.0};
  r.length = {100.0, 500.0};
  CostWeights w{0.5, 0.25, 0.25};
  CandidateEvaluation e{95.0, 30.0, 300.0};
  CHECK(cost(e, w, r) == doctest::Approx(0.25 * 0.5 + 0.25 * 0.5).epsilon(1e-12));
}

TEST_CASE("metrics outside a range are clamped") {
  NormalizationRanges r;
  r.available = true;
  r.temp = {60.0, 100.0};
  r.stress = {10.0, 50.0};
  r.length = {100.0, 500.0};
  CostWeights w{1.0, 0.0, 0.0};
  CHECK(cost({150.0, 10.0, 100.0}, w, r) == 1.0);
  CHECK(cost({20.0, 10.0, 100.0}, w, r) == 0.0);
}

TEST_CASE("linear fallback when ranges are unavailable") {
  NormalizationRanges r;
  r.available = false;
  r.fallback_sigma_max = 400.0;
  r.fallback_length0 = 200.0;
  CostWeights w{0.3, 0.2, 0.5};
  CandidateEvaluation e{80.0, 100.0, 300.0};
  CHECK(cost(e, w, r) ==
        doctest::Approx(0.3 * 0.8 + 0.2 * 0.25 + 0.5 * 1.5).epsilon(1e-12));
}

TEST_CASE("acceptance rule") {
  // improvement is always accepted
  CHECK(acceptance(1.0, 0.5, 0.01, 0.999999));
  // delta = -0.2 at T = 0.5: exp(-0.4) = 0.6703 > 0.5: accept
  CHECK(acceptance(0.3, 0.5, 0.5, 0.5));
  CHECK(acceptance_probability(0.3, 0.5, 0.5) ==
        doctest::Approx(std::exp(-0.4)).epsilon(1e-12));
  // delta = -5 at T = 0.01: probability e^-500, reject
  CHECK_FALSE(acceptance(0.0, 5.0, 0.01, 0.1));
  // equal costs accept for any u < 1
  CHECK(acceptance(0.7, 0.7, 0.2, 0.999999));
}

TEST_CASE("acceptance depends only on the cost difference") {
  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    double oc = rng.uniform(0.0, 2.0);
    double nc = rng.uniform(0.0, 2.0);
    double shift = rng.uniform(-5.0, 5.0);
    double t = rng.uniform(0.01, 1.0);
    double u = rng.uniform();
    CHECK(acceptance(oc, nc, t, u) == acceptance(oc + shift, nc + shift, t, u));
  }
}

TEST_CASE("empirical acceptance rate matches the Boltzmann probability") {
  // delta = -0.2, T = 0.5: p = exp(-0.4) = 0.670320
  const double p_expected = std::exp(-0.4);
  SplitMix64 rng(12345);
  int accepted = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i)
    if (acceptance(0.0, 0.2, 0.5, rng.uniform())) accepted++;
  double rate = static_cast<double>(accepted) / trials;
  CHECK(std::abs(rate - p_expected) <= 0.005 * p_expected);
}

TEST_CASE("schedule (1.0, 0.9, 0.01) has exactly 44 levels") {
  AnnealSchedule sched;
  sched.initial_temp = 1.0;
  sched.cooling_rate = 0.9;
  sched.stop_temp = 0.01;
  // logarithm oracle: ceil(log(0.01) / log(0.9))
  int expected = static_cast<int>(std::ceil(std::log(0.01) / std::log(0.9)));
  CHECK(expected == 44);
  CHECK(sched.level_count() == 44);
}

TEST_CASE("perturb outputs are always feasible") {
  ArchitectureSpec spec = loop_spec();
  Placement p = initial_placement(spec, 1);
  SplitMix64 rng(42);
  MoveConfig cfg;
  int changed = 0;
  for (int i = 0; i < 1000; ++i) {
    MoveOutcome mv;
    Placement q = perturb(p, spec, rng, cfg, 0.8, &mv);
    CHECK(validate_placement(q, spec).ok());
    if (mv.feasible) {
      p = q;
      changed++;
    }
  }
  CHECK(changed > 900); // moves almost always succeed on a roomy interposer
}

TEST_CASE("single-chiplet specs never draw a swap move") {
  ArchitectureSpec spec = make_spec(30, 30, {{"solo", 8, 8, 5.0}});
  Placement p = initial_placement(spec, 1);
  SplitMix64 rng(7);
  MoveConfig cfg;
  for (int i = 0; i < 500; ++i) {
    MoveOutcome mv;
    p = perturb(p, spec, rng, cfg, 0.5, &mv);
    CHECK(mv.kind != MoveKind::Swap);
  }
}

TEST_CASE("fixed rng seed gives an identical move sequence") {
  ArchitectureSpec spec = loop_spec();
  Placement p = initial_placement(spec, 1);
  MoveConfig cfg;
  SplitMix64 rng1(55), rng2(55);
  Placement a = p, b = p;
  for (int i = 0; i < 50; ++i) {
    a = perturb(a, spec, rng1, cfg, 0.6);
    b = perturb(b, spec, rng2, cfg, 0.6);
    CHECK(a == b);
  }
}

TEST_CASE("zero-iteration schedule returns the initial placement") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 0;
  AnnealOptions opts;
  opts.warmup_samples = 0;
  OptimizationReport r = anneal(spec, Objective::WST, sched, 9, fake_backend(spec), opts);
  CHECK(r.best_placement == r.initial_placement);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("same seed gives byte-identical reports") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 6;
  AnnealOptions opts;
  opts.warmup_samples = 5;
  OptimizationReport r1 = anneal(spec, Objective::WST, sched, 77, fake_backend(spec), opts);
  OptimizationReport r2 = anneal(spec, Objective::WST, sched, 77, fake_backend(spec), opts);
  CHECK(report_to_json(r1) == report_to_json(r2));
}

TEST_CASE("trace is monotone in annealing temperature and best cost is the minimum") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 8;
  AnnealOptions opts;
  opts.warmup_samples = 10;
  OptimizationReport r = anneal(spec, Objective::WST, sched, 5, fake_backend(spec), opts);

  double min_cost = r.trace.front().cost_new;
  double best_so_far = r.trace.front().cost_new;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].anneal_t <= r.trace[i - 1].anneal_t + 1e-15);
    min_cost = std::min(min_cost, r.trace[i].cost_new);
    best_so_far = std::min(best_so_far, r.trace[i].cost_new);
    CHECK(best_so_far <= r.trace[i].cost_new + 1e-15);
  }
  CHECK(r.best_cost == min_cost);
}

TEST_CASE("weight ledger: every WST trace entry satisfies the weight invariants") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 8;
  AnnealOptions opts;
  opts.warmup_samples = 10;
  OptimizationReport r = anneal(spec, Objective::WST, sched, 6, fake_backend(spec), opts);
  REQUIRE(r.trace.size() > 3);
  for (const TraceEntry& t : r.trace) {
    CHECK(t.weights.a >= 0.0);
    CHECK(t.weights.a <= 0.5);
    CHECK(t.weights.b >= 0.1);
    CHECK(t.weights.b <= 0.5);
    CHECK(t.weights.c == std::abs(1.0 - t.weights.a - t.weights.b));
  }
}

TEST_CASE("WT mode ignores stress values entirely") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 8;
  AnnealOptions opts;
  opts.warmup_samples = 10;

  EvalFn base = fake_backend(spec);
  EvalFn distorted = [base](const Placement& p, bool full) {
    CandidateEvaluation e = base(p, full);
    e.peak_stress = e.peak_stress * 17.0 + 123.0; // stress wildly perturbed
    return e;
  };
  OptimizationReport r1 = anneal(spec, Objective::WT, sched, 8, base, opts);
  OptimizationReport r2 = anneal(spec, Objective::WT, sched, 8, distorted, opts);

  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t i = 0; i < r1.trace.size(); ++i) {
    CHECK(r1.trace[i].level == r2.trace[i].level);
    CHECK(r1.trace[i].iter == r2.trace[i].iter);
    CHECK(r1.trace[i].eval.peak_temp == r2.trace[i].eval.peak_temp);
    CHECK(r1.trace[i].eval.wirelength == r2.trace[i].eval.wirelength);
    CHECK(r1.trace[i].weights.b == 0.0);
  }
  CHECK(r1.best_placement == r2.best_placement);
}

TEST_CASE("objective masking: WS ignores temperature, weights stay consistent") {
  CandidateEvaluation cur{90.0, 200.0, 500.0};
  CandidateEvaluation cand{95.0, 150.0, 400.0};
  CostWeights wt = adaptive_weights(cur, cand, 400.0, Objective::WT);
  CHECK(wt.b == 0.0);
  CHECK(wt.c == std::abs(1.0 - wt.a));
  CostWeights ws = adaptive_weights(cur, cand, 400.0, Objective::WS);
  CHECK(ws.a == 0.0);
  CHECK(ws.c == std::abs(1.0 - ws.b));
  CostWeights wst = adaptive_weights(cur, cand, 400.0, Objective::WST);
  CHECK(wst.a == temperature_weight(90.0, 95.0));
  CHECK(wst.b == stress_weight(200.0, 150.0, 400.0));
  CHECK(wst.c == std::abs(1.0 - wst.a - wst.b));
}

TEST_CASE("report JSON round-trips") {
  ArchitectureSpec spec = loop_spec();
  AnnealSchedule sched;
  sched.iters_per_level = 4;
  AnnealOptions opts;
  opts.warmup_samples = 4;
  OptimizationReport r = anneal(spec, Objective::WS, sched, 3, fake_backend(spec), opts);
  r.grad_mean = 1.5;
  r.ts_corr = -0.25;
  r.correlations_defined = true;
  r.wall_clock_s = 12.5;
  OptimizationReport back = report_from_json(report_to_json(r));
  CHECK(back.architecture == r.architecture);
  CHECK(back.objective == r.objective);
  CHECK(back.seed == r.seed);
  CHECK(back.trace.size() == r.trace.size());
  CHECK(back.best_placement == r.best_placement);
  CHECK(back.best_cost == r.best_cost);
  CHECK(back.ranges.available == r.ranges.available);
  CHECK(back.ts_corr == r.ts_corr);
  CHECK(back.wall_clock_s == r.wall_clock_s);
}

} // TEST_SUITE
