#pragma once

#include "mdlambo/baselines.hpp"
#include "mdlambo/driver.hpp"
#include "mdlambo/io.hpp"
#include "mdlambo/metrics.hpp"
#include "mdlambo/problems.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mdlambo {

struct HarnessConfig {
  DriverConfig driver;
  SgdConfig sgd;
  LbfgsConfig lbfgs;
  std::vector<int> subspaces = {6};  // catalogue indices to run
  bool with_baselines = false;
  std::string problem_glob = "*";
  int variants = 0;              // extra transformed copies per problem
  std::uint64_t seed = 0;
  int threads = 1;
};

std::string mdlambo_algorithm_id(int subspace_index);

struct CellResult {
  std::string algorithm_id;
  ProblemSpec problem;
  RunResult run;
  double final_grad_norm = 0.0;
  std::string termination;
};

struct GridResult {
  std::vector<CellResult> cells;  // deterministic order: problem-major
  std::vector<ProblemSpec> problems;
};

/// Expands the glob and variant settings into the concrete problem list.
std::vector<ProblemSpec> harness_problems(const HarnessConfig& cfg);

/// Runs every (algorithm, problem) cell on a worker pool. Results land in
/// a pre-sized vector indexed by cell, so the output order and content
/// are independent of scheduling.
GridResult run_grid(const HarnessConfig& cfg);

RunTable grid_to_table(const GridResult& grid);

struct TnErrorResult {
  // (subspace index, problem name) -> per-iteration TN-step errors.
  std::map<std::pair<int, std::string>, std::vector<double>> samples;
  std::vector<ProblemSpec> problems;
};

/// The interpolation-versus-Taylor model experiment: runs the driver and
/// measures the truncated-Newton step distance between the two projected
/// models at every iteration. Only distinct subspaces are run (the
/// coinciding pairs are reported through the merge in tn_error_report).
/// Problems above the dimension cap are skipped to keep the experiment
/// desk-scale.
TnErrorResult run_tn_error_experiment(const HarnessConfig& cfg, int max_problem_dim = 10,
                                      std::vector<int> subspaces = {});

/// Subspace indices with pairwise-distinct enclosing spans (drops 9, 11
/// and 15, which coincide with 13, 12 and 16).
std::vector<int> distinct_subspace_indices();

}  // namespace mdlambo
