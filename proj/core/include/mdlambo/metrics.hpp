#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdlambo {

/// Per-(algorithm, problem) objective-value trace: f at iteration 0..K.
struct RunTrace {
  std::vector<double> f_values;
  double f_best = 0.0;       // best known value for the problem
  std::string status;        // final driver status
};

struct RunKey {
  std::string algorithm;
  std::string problem;
  bool operator<(const RunKey& o) const {
    return algorithm != o.algorithm ? algorithm < o.algorithm : problem < o.problem;
  }
  bool operator==(const RunKey& o) const = default;
};

struct RunTable {
  std::map<RunKey, RunTrace> entries;
};

/// Cumulative-best relative decrease after each iteration, clipped to
/// [0, 1]. Identically 1 when the problem is solved at the start.
std::vector<double> f_accuracy(const std::vector<double>& f_values, double f_best);

/// Smallest iteration count N with accuracy >= 1 - tau; absent when the
/// trace never reaches it.
std::optional<int> solve_iterations(const std::vector<double>& f_values, double f_best,
                                    double tau);

struct ProfileCurve {
  std::string algorithm;
  double tau = 0.0;
  std::vector<double> alpha;  // log-spaced grid on [1, alpha_max]
  std::vector<double> rho;    // fraction solved within alpha x best
};

struct ProfileOptions {
  int grid_points = 64;
  double alpha_max = 64.0;
};

struct ProfileResult {
  std::vector<ProfileCurve> curves;
  int dropped_problems = 0;  // solved by no algorithm, removed from the pool
};

ProfileResult profile(const RunTable& table, double tau, const ProfileOptions& opt = {});

/// Algorithms achieving the minimal solve count on the problem.
std::vector<std::string> fast_algorithms(const RunTable& table, const std::string& problem,
                                         double tau);

struct TnSummary {
  int subspace = 0;            // canonical index after merging duplicates
  std::vector<int> merged_from;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double p40 = 0.0, p60 = 0.0;  // central band
  double max_value = 0.0;
  int count = 0;
};

/// Quartile summaries per subspace; samples of coinciding subspaces
/// (11 with 12, 15 with 16, 9 with 13) are pooled under the higher index.
std::vector<TnSummary> tn_error_report(const std::map<int, std::vector<double>>& samples);

/// Linear-interpolation percentile of a sample, p in [0, 100].
double percentile(std::vector<double> sorted_values, double p);

}  // namespace mdlambo
