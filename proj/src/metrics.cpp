#include "chipletplace/metrics.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace chiplet {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: sample sizes differ");
  if (x.size() < 2) throw ValidationError("pearson: need at least 2 samples");

  // single-pass co-moment accumulation (Welford style)
  double mx = 0.0, my = 0.0, cxx = 0.0, cyy = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double n = static_cast<double>(i + 1);
    double dx = x[i] - mx;
    double dy = y[i] - my;
    mx += dx / n;
    my += dy / n;
    cxx += dx * (x[i] - mx);
    cyy += dy * (y[i] - my);
    cxy += dx * (y[i] - my);
  }
  if (cxx == 0.0 || cyy == 0.0)
    throw ValidationError("pearson: correlation undefined for constant input");
  double r = cxy / std::sqrt(cxx * cyy);
  return std::clamp(r, -1.0, 1.0);
}

FieldCorrelations field_correlations(const ScalarField& t, const ScalarField& svm,
                                     const ScalarField& grad) {
  auto check = [&](const ScalarField& f, const char* what) {
    if (f.nz != 1) throw ValidationError(std::string(what) + " must be a single plane");
    if (f.nx != t.nx || f.ny != t.ny)
      throw ValidationError(std::string(what) + " grid does not match the temperature plane");
  };
  check(t, "temperature");
  check(svm, "stress");
  check(grad, "gradient");

  FieldCorrelations out;
  out.ts = pearson(t.values, svm.values);
  out.gs = pearson(grad.values, svm.values);
  return out;
}

RunComparison compare_runs(const std::vector<OptimizationReport>& reports) {
  if (reports.size() < 2)
    throw ValidationError("compare_runs needs at least two reports");
  for (const OptimizationReport& r : reports)
    if (r.architecture != reports.front().architecture)
      throw ValidationError("compare_runs: mixed architectures ('" +
                            reports.front().architecture + "' vs '" + r.architecture + "')");

  RunComparison cmp;
  cmp.architecture = reports.front().architecture;

  auto row_from = [](const OptimizationReport& r) {
    ComparisonRow row;
    row.objective = objective_name(r.objective);
    row.peak_temp = r.best_eval.peak_temp;
    row.peak_stress = r.best_eval.peak_stress;
    row.wirelength = r.best_eval.wirelength;
    row.grad_mean = r.grad_mean;
    row.grad_std = r.grad_std;
    row.grad_max = r.grad_max;
    row.ts_corr = r.ts_corr;
    row.gs_corr = r.gs_corr;
    row.correlations_defined = r.correlations_defined;
    return row;
  };

  // keep one row per objective in wt, ws, wst order (last report wins)
  for (Objective o : {Objective::WT, Objective::WS, Objective::WST}) {
    const OptimizationReport* pick = nullptr;
    for (const OptimizationReport& r : reports)
      if (r.objective == o) pick = &r;
    if (pick) cmp.rows.push_back(row_from(*pick));
  }

  const ComparisonRow* wt = nullptr;
  const ComparisonRow* wst = nullptr;
  for (const ComparisonRow& row : cmp.rows) {
    if (row.objective == "wt") wt = &row;
    if (row.objective == "wst") wst = &row;
  }
  if (wt && wst) {
    cmp.has_deltas = true;
    auto pct = [](double baseline, double value) {
      return baseline != 0.0 ? (value - baseline) / baseline * 100.0 : 0.0;
    };
    cmp.d_stress_pct = pct(wt->peak_stress, wst->peak_stress);
    cmp.d_temp_pct = pct(wt->peak_temp, wst->peak_temp);
    cmp.d_length_pct = pct(wt->wirelength, wst->wirelength);
  }
  return cmp;
}

namespace {

std::string num(double v, int prec = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

} // namespace

std::string comparison_table(const RunComparison& cmp) {
  std::ostringstream os;
  os << "architecture: " << cmp.architecture << "\n";
  os << std::left << std::setw(10) << "objective" << std::right << std::setw(12) << "temp_C"
     << std::setw(14) << "stress_MPa" << std::setw(16) << "wirelength_mm" << std::setw(12)
     << "grad_mean" << std::setw(12) << "grad_std" << std::setw(12) << "grad_max"
     << std::setw(10) << "ts_corr" << std::setw(10) << "gs_corr" << "\n";
  for (const ComparisonRow& r : cmp.rows) {
    os << std::left << std::setw(10) << r.objective << std::right << std::setw(12)
       << num(r.peak_temp, 2) << std::setw(14) << num(r.peak_stress, 2) << std::setw(16)
       << num(r.wirelength, 1) << std::setw(12) << num(r.grad_mean) << std::setw(12)
       << num(r.grad_std) << std::setw(12) << num(r.grad_max);
    if (r.correlations_defined)
      os << std::setw(10) << num(r.ts_corr) << std::setw(10) << num(r.gs_corr);
    else
      os << std::setw(10) << "n/a" << std::setw(10) << "n/a";
    os << "\n";
  }
  if (cmp.has_deltas) {
    os << "wst vs wt: stress " << num(cmp.d_stress_pct, 1) << "%, temperature "
       << num(cmp.d_temp_pct, 1) << "%, wirelength " << num(cmp.d_length_pct, 1) << "%\n";
  }
  return os.str();
}

std::string comparison_csv(const RunComparison& cmp) {
  std::ostringstream os;
  os << "architecture,objective,peak_temp_c,peak_stress_mpa,wirelength_mm,"

        "grad_mean,grad_std,grad_max,ts_corr,gs_corr\n";
  os << std::setprecision(17);
  for (const ComparisonRow& r : cmp.rows) {
    os << cmp.architecture << ',' << r.objective << ',' << r.peak_temp << ','
       << r.peak_stress << ',' << r.wirelength << ',' << r.grad_mean << ',' << r.grad_std
       << ',' << r.grad_max << ',';
    if (r.correlations_defined)
      os << r.ts_corr << ',' << r.gs_corr;
    else
      os << ',';
    os << "\n";
  }
  if (cmp.has_deltas) {
    os << cmp.architecture << ",wst_vs_wt_pct," << cmp.d_temp_pct << ',' << cmp.d_stress_pct
       << ',' << cmp.d_length_pct << ",,,,,\n";
  }
  return os.str();
}

} // namespace chiplet
