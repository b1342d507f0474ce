#pragma once

#include "mdlambo/stcg.hpp"

#include <optional>
#include <vector>

namespace mdlambo {

struct DriverConfig {
  double eta1 = 0.1;        // acceptance threshold, 0 < eta1 <= eta2 < 1
  double eta2 = 0.75;       // very-successful threshold
  double gamma_inc = 2.0;   // radius growth, > 1
  double gamma_dec = 0.5;   // radius shrink, in (0, 1)
  double sigma_sub = 1.0;   // fixed sigma used only for subspace construction
  double sigma0 = 1.0;      // initial regularization weight, > 0
  double delta0 = 1.0;      // initial trust-region radius, > 0
  double grad_tol = 1e-6;
  int max_iter = 1000;
  int subspace_index = 6;   // catalogue index, 1..16

  // Plumbing caps so very successful streaks cannot overflow.
  double delta_max = 1e6;
  double sigma_min = 1e-8;

  void validate() const;
};

struct IterationRecord {
  int k = 0;
  Vector x;             // iterate at the start of iteration k
  double f = 0.0;       // f(x_k)
  double grad_norm = 0.0;
  double delta = 0.0;   // radius used at iteration k
  double sigma = 0.0;   // regularization weight reported at iteration k
  double rho = 0.0;     // actual/predicted ratio (-inf on degenerate steps)
  int q = 0;            // projected dimension
  bool accepted = false;
  StcgStatus status = StcgStatus::ZeroGradient;
  bool fallback = false;  // history-based region replaced by the gradient line
};

enum class Termination { GradTol, MaxIter, ModelStall };
const char* to_string(Termination t);

struct RunResult {
  Vector best_x;
  double best_f = 0.0;
  std::vector<IterationRecord> iterations;
  std::vector<double> f_series;  // f(x_0), ..., f(x_K); rejections repeat the value
  Termination termination = Termination::MaxIter;
};

/// Propagated when the objective fails mid-run; carries the trace so far.
struct RunError : std::runtime_error {
  RunError(const std::string& what, RunResult partial)
      : std::runtime_error(what), partial_result(std::move(partial)) {}
  RunResult partial_result;
};

/// Normalized directions from the two most recent distinct accepted
/// iterates: s1 points to the older one, s2 to the newer. Absent when
/// fewer than two distinct predecessors exist.
std::optional<std::pair<Vector, Vector>> history_directions(
    const std::vector<Vector>& accepted_trace);

struct RhoOutcome {
  double rho = 0.0;
  double f_trial = 0.0;
  bool degenerate = false;  // predicted decrease below noise, reject outright
};

/// Actual-versus-predicted ratio of the step y_star under the projected
/// model. f_k is the cached objective value at x_k.
RhoOutcome compute_rho(const Objective& f, const Vector& x_k, double f_k,
                       const ProjectionMatrix& P, const Vector& y_star,
                       const CubicModel& projected_model);

struct StateUpdate {
  double delta_next = 0.0;
  double sigma_next = 0.0;
  bool accept = false;
};

/// Three-branch radius/regularization update: very successful steps grow
/// the radius and relax the regularization, failed ones do the reverse.
StateUpdate update_state(double rho, double delta, double sigma, const DriverConfig& cfg);

/// Per-iteration hook for experiment harnesses (models are quadratic,
/// expressed in the projected coordinates).
struct IterationView {
  int k;
  const Vector& x;
  const ProjectionMatrix& P;
  const CubicModel& projected_quadratic;  // cubic_weight == 0
  double delta;
  const Objective& objective;
};
using IterationObserver = std::function<void(const IterationView&)>;

/// The outer subspace trust-region loop: model, subspace, projection,
/// subproblem, step-quality test, radius update.
RunResult run(const Objective& f, const Vector& x0, const DriverConfig& cfg,
              const IterationObserver& observer = nullptr);

}  // namespace mdlambo
