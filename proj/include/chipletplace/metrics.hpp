#ifndef CHIPLETPLACE_METRICS_HPP
#define CHIPLETPLACE_METRICS_HPP

// Post-hoc analysis: correlation metrics over solver fields and run
// comparison tables.

#include "chipletplace/anneal.hpp"
#include "chipletplace/thermal.hpp"

#include <span>
#include <string>
#include <vector>

namespace chiplet {

// Pearson product-moment correlation via single-pass co-moments.
// Throws ValidationError on length mismatch, length < 2, or constant input
// (the correlation is undefined, never silently 0).
double pearson(std::span<const double> x, std::span<const double> y);

struct FieldCorrelations {
  double ts = 0.0; // temperature vs von Mises
  double gs = 0.0; // |grad T| vs von Mises
};

// Correlations over one shared plane (all three fields must be nz = 1
// with identical extents).
FieldCorrelations field_correlations(const ScalarField& t, const ScalarField& svm,
                                     const ScalarField& grad);

struct ComparisonRow {
  std::string objective;
  double peak_temp = 0.0;
  double peak_stress = 0.0;
  double wirelength = 0.0;
  double grad_mean = 0.0, grad_std = 0.0, grad_max = 0.0;
  double ts_corr = 0.0, gs_corr = 0.0;
  bool correlations_defined = false;
};

struct RunComparison {
  std::string architecture;
  std::vector<ComparisonRow> rows; // objective order wt, ws, wst
  // percentage deltas of WST vs the WT baseline, NaN when a row is absent
  double d_stress_pct = 0.0;
  double d_temp_pct = 0.0;
  double d_length_pct = 0.0;
  bool has_deltas = false;
};

// One row per objective mode; throws ValidationError on mixed
// architectures or fewer than two reports.
RunComparison compare_runs(const std::vector<OptimizationReport>& reports);

std::string comparison_table(const RunComparison& cmp); // aligned text
std::string comparison_csv(const RunComparison& cmp);

} // namespace chiplet

#endif
