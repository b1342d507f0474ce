#pragma once

#include "mdlambo/driver.hpp"
#include "mdlambo/metrics.hpp"
#include "mdlambo/problems.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace mdlambo {

/// One run-CSV row (schema A):
/// algorithm_id,problem_id,iter,f,grad_norm,delta,sigma,rho,accepted
struct RunCsvRow {
  std::string algorithm_id;
  std::string problem_id;
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  bool accepted = false;
};

/// Per-run rows: one per iteration record plus a terminal row holding the
/// final point's value and gradient norm (rho 0, accepted true).
std::vector<RunCsvRow> run_to_rows(const std::string& algorithm_id,
                                   const std::string& problem_id, const RunResult& run,
                                   double final_grad_norm);

void write_run_csv(std::ostream& os, const std::vector<RunCsvRow>& rows);
std::vector<RunCsvRow> read_run_csv(std::istream& is);

/// Rebuilds the metric table (f-value traces) from schema-A rows.
RunTable rows_to_table(const std::vector<RunCsvRow>& rows,
                       const std::map<std::string, double>& f_best_by_problem);

/// Profile CSV (schema B): algorithm_id,tau,alpha,rho_a
void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves);
std::vector<ProfileCurve> read_profile_csv(std::istream& is);

/// Step-function SVG of the profile curves for one tau.
void write_profile_svg(std::ostream& os, const std::vector<ProfileCurve>& curves);

/// Versioned line-delimited JSON trace of an outer-loop run.
void write_trace_jsonl(std::ostream& os, const std::string& algorithm_id,
                       const std::string& problem_id, const RunResult& run);

/// Problem manifest: name, n, variant, f_best, provenance per row.
void write_manifest_csv(std::ostream& os, const std::vector<ProblemSpec>& problems);
std::map<std::string, double> read_manifest_f_best(std::istream& is);

/// TN-error outputs: full sorted samples plus the quartile summary.
void write_tn_samples_csv(std::ostream& os,
                          const std::map<std::pair<int, std::string>, std::vector<double>>&
                              samples_by_subspace_problem);
void write_tn_summary_csv(std::ostream& os, const std::vector<TnSummary>& summaries);

/// Plain-text `key = value` config supporting DriverConfig fields plus
/// `sgd.` / `lbfgs.` prefixed baseline fields. Unknown keys throw.
struct HarnessConfig;
void apply_config_file(const std::filesystem::path& path, HarnessConfig& cfg);

/// Exact double formatting used everywhere (round-trippable %.17g).
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace mdlambo
