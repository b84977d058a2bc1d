#include <doctest.h>

#include "chipletplace/error.hpp"
#include "chipletplace/metrics.hpp"
#include "chipletplace/rng.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace chiplet;

namespace {

// textbook two-pass covariance oracle
double pearson_two_pass(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

ScalarField plane(int n, double fill = 0.0) {
  ScalarField f;
  f.nx = f.ny = n;
  f.nz = 1;
  f.dx = f.dy = 1.0;
  f.values.assign(static_cast<std::size_t>(n) * n, fill);
  return f;
}

OptimizationReport fixture_report(Objective obj, double temp, double stress, double length) {
  OptimizationReport r;
  r.architecture = "ascend910";
  r.objective = obj;
  r.best_eval = CandidateEvaluation{temp, stress, length};
  return r;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("perfect linear relations") {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y1, y2;
  for (double v : x) {
    y1.push_back(2.0 * v + 1.0);
    y2.push_back(-v);
  }
  CHECK(pearson(x, y1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(x, y2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("matches the two-pass covariance oracle to 1e-12") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 100; ++i) {
      x.push_back(rng.uniform(-10.0, 10.0));
      y.push_back(0.3 * x.back() + rng.uniform(-5.0, 5.0));
    }
    CHECK(pearson(x, y) == doctest::Approx(pearson_two_pass(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("constant input is an error, not zero") {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> c{7, 7, 7, 7};
  CHECK_THROWS_AS(pearson(x, c), ValidationError);
  CHECK_THROWS_AS(pearson(c, x), ValidationError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}),
                  ValidationError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1.0, 2.0}), ValidationError);
}

TEST_CASE("pearson is symmetric and affine invariant") {
  SplitMix64 rng(43);
  std::vector<double> x, y;
  for (int i = 0; i < 64; ++i) {
    x.push_back(rng.uniform(-3.0, 3.0));
    y.push_back(rng.uniform(-3.0, 3.0));
  }
  CHECK(pearson(x, y) == doctest::Approx(pearson(y, x)).epsilon(1e-12));
  std::vector<double> xt;
  for (double v : x) xt.push_back(2.5 * v + 11.0); // positive affine map
  CHECK(pearson(xt, y) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("synthetic proportional fields correlate perfectly") {
  ScalarField t = plane(16), svm = plane(16), grad = plane(16);
  SplitMix64 rng(47);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = 23.0 + rng.uniform(0.0, 50.0);
    grad.values[i] = rng.uniform(0.0, 9.0);
    svm.values[i] = 4.0 * grad.values[i]; // sigma proportional to |grad T|
  }
  FieldCorrelations fc = field_correlations(t, svm, grad);
  CHECK(fc.gs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent noise decorrelates on a 64x64 plane") {
  int within = 0;
  const int trials = 100;
  SplitMix64 rng(53);
  for (int trial = 0; trial < trials; ++trial) {
    ScalarField t = plane(64), svm = plane(64), grad = plane(64);
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      t.values[i] = 60.0 + rng.gauss() * 8.0;
      svm.values[i] = 100.0 + rng.gauss() * 20.0; // independent of t
      grad.values[i] = std::abs(rng.gauss());
    }
    FieldCorrelations fc = field_correlations(t, svm, grad);
    if (std::abs(fc.ts) < 0.1) within++;
  }
  CHECK(within >= 95); // 0.1 is ~6.4 sigma for n = 4096; 95% is conservative
}

TEST_CASE("constant stress field makes correlations undefined") {
  ScalarField t = plane(8), svm = plane(8, 5.0), grad = plane(8);
  SplitMix64 rng(59);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = rng.uniform(20.0, 90.0);
    grad.values[i] = rng.uniform(0.0, 4.0);
  }
  CHECK_THROWS_AS(field_correlations(t, svm, grad), ValidationError);
}

TEST_CASE("identical reports give zero deltas") {
  std::vector<OptimizationReport> reports{
      fixture_report(Objective::WT, 81.06, 232.63, 27200.0),
      fixture_report(Objective::WST, 81.06, 232.63, 27200.0)};
  RunComparison cmp = compare_runs(reports);
  REQUIRE(cmp.has_deltas);
  CHECK(cmp.d_stress_pct == 0.0);
  CHECK(cmp.d_temp_pct == 0.0);
  CHECK(cmp.d_length_pct == 0.0);
}

TEST_CASE("published WT/WST fixture reproduces the -4.5% stress delta") {
  // Ascend910 rows: WT (81.06 C, 232.63 MPa, 27200 mm),
  //                 WST (79.04 C, 222.14 MPa, 27787 mm)
  std::vector<OptimizationReport> reports{
      fixture_report(Objective::WT, 81.06, 232.63, 27200.0),
      fixture_report(Objective::WS, 81.21, 226.89, 25895.0),
      fixture_report(Objective::WST, 79.04, 222.14, 27787.0)};
  RunComparison cmp = compare_runs(reports);
  REQUIRE(cmp.rows.size() == 3);
  REQUIRE(cmp.has_deltas);
  CHECK(cmp.d_stress_pct == doctest::Approx(-4.5).epsilon(0.02)); // -4.5% headline
  // hand-recomputed deltas to 0.1%
  CHECK(cmp.d_stress_pct ==
        doctest::Approx((222.14 - 232.63) / 232.63 * 100.0).epsilon(1e-12));
  CHECK(std::abs(cmp.d_temp_pct - (79.04 - 81.06) / 81.06 * 100.0) < 0.1);
  CHECK(std::abs(cmp.d_length_pct - (27787.0 - 27200.0) / 27200.0 * 100.0) < 0.1);
}

TEST_CASE("swapping baseline and candidate metric rows flips every delta sign") {
  std::vector<OptimizationReport> fwd{fixture_report(Objective::WT, 81.06, 232.63, 27200.0),
                                      fixture_report(Objective::WST, 79.04, 222.14, 27787.0)};
  std::vector<OptimizationReport> swapped{
      fixture_report(Objective::WT, 79.04, 222.14, 27787.0),
      fixture_report(Objective::WST, 81.06, 232.63, 27200.0)};
  RunComparison a = compare_runs(fwd);
  RunComparison b = compare_runs(swapped);
  CHECK(a.d_stress_pct * b.d_stress_pct < 0.0);
  CHECK(a.d_temp_pct * b.d_temp_pct < 0.0);
  CHECK(a.d_length_pct * b.d_length_pct < 0.0);
  // the underlying absolute differences are exactly antisymmetric
  CHECK(a.d_stress_pct / 100.0 * 232.63 ==
        doctest::Approx(-(b.d_stress_pct / 100.0 * 222.14)).epsilon(1e-12));
}

TEST_CASE("mixed architectures are rejected") {
  OptimizationReport other = fixture_report(Objective::WST, 80.0, 200.0, 1000.0);
  other.architecture = "different";
  std::vector<OptimizationReport> reports{fixture_report(Objective::WT, 81.0, 230.0, 27000.0),
                                          other};
  CHECK_THROWS_AS(compare_runs(reports), ValidationError);
}

TEST_CASE("comparison CSV reparses to the same values") {
  std::vector<OptimizationReport> reports{
      fixture_report(Objective::WT, 81.06, 232.63, 27200.0),
      fixture_report(Objective::WST, 79.04, 222.14, 27787.0)};
  RunComparison cmp = compare_runs(reports);
  std::string csv = comparison_csv(cmp);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line); // header
  std::getline(in, line); // wt row
  std::vector<std::string> cells;
  std::stringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() >= 5);
  CHECK(cells[1] == "wt");
  CHECK(std::stod(cells[2]) == 81.06);
  CHECK(std::stod(cells[3]) == 232.63);
  CHECK(std::stod(cells[4]) == 27200.0);
}

} // TEST_SUITE
