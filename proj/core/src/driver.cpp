#include "mdlambo/driver.hpp"

#include <cmath>
#include <limits>

namespace mdlambo {

namespace {
constexpr double kDistinctTol = 1e-14;
constexpr double kStallDelta = 1e-18;
}  // namespace

void DriverConfig::validate() const {
  if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0))
    throw std::invalid_argument("DriverConfig: need 0 < eta1 <= eta2 < 1");
  if (!(gamma_inc > 1.0)) throw std::invalid_argument("DriverConfig: gamma_inc must be > 1");
  if (!(gamma_dec > 0.0 && gamma_dec < 1.0))
    throw std::invalid_argument("DriverConfig: gamma_dec must be in (0, 1)");
  if (sigma_sub < 0.0) throw std::invalid_argument("DriverConfig: sigma_sub must be >= 0");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("DriverConfig: sigma0 must be > 0");
  if (!(delta0 > 0.0)) throw std::invalid_argument("DriverConfig: delta0 must be > 0");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("DriverConfig: grad_tol must be > 0");
  if (max_iter < 0) throw std::invalid_argument("DriverConfig: max_iter must be >= 0");
  subspace_catalogue(subspace_index);  // validates the range
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::MaxIter: return "max_iter";
    case Termination::ModelStall: return "model_stall";
  }
  return "?";
}

std::optional<std::pair<Vector, Vector>> history_directions(
    const std::vector<Vector>& accepted_trace) {
  if (accepted_trace.size() < 3) return std::nullopt;
  const Vector& xk = accepted_trace.back();
  // Walk backwards collecting the two most recent distinct predecessors.
  std::vector<Vector> dirs;
  for (auto it = accepted_trace.rbegin() + 1; it != accepted_trace.rend() && dirs.size() < 2;
       ++it) {
    Vector diff = *it - xk;
    const double nd = diff.norm();
    if (nd < kDistinctTol) continue;  // not a distinct predecessor
    dirs.push_back(diff / nd);
  }
  if (dirs.size() < 2) return std::nullopt;
  // dirs[0] came from x_{k-1}, dirs[1] from x_{k-2}; s1 is the older.
  return std::make_pair(dirs[1], dirs[0]);
}

RhoOutcome compute_rho(const Objective& f, const Vector& x_k, double f_k,
                       const ProjectionMatrix& P, const Vector& y_star,
                       const CubicModel& projected_model) {
  RhoOutcome out;
  const double predicted =
      eval_model(projected_model, Vector::Zero(y_star.size())) -
      eval_model(projected_model, y_star);
  if (predicted <= 1e-14 * std::max(1.0, std::abs(f_k))) {
    out.degenerate = true;
    out.rho = -std::numeric_limits<double>::infinity();
    out.f_trial = f_k;
    return out;
  }
  out.f_trial = f.value(x_k + P.columns * y_star);
  out.rho = (f_k - out.f_trial) / predicted;
  return out;
}

StateUpdate update_state(double rho, double delta, double sigma, const DriverConfig& cfg) {
  if (!(delta > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("update_state: delta and sigma must be positive");
  StateUpdate u;
  if (rho >= cfg.eta2) {
    u.accept = true;
    u.delta_next = std::min(cfg.gamma_inc * delta, cfg.delta_max);
    u.sigma_next = std::max(cfg.gamma_dec * sigma, cfg.sigma_min);
  } else if (rho >= cfg.eta1) {
    u.accept = true;
    u.delta_next = delta;
    u.sigma_next = sigma;
  } else {
    u.accept = false;
    u.delta_next = cfg.gamma_dec * delta;
    u.sigma_next = cfg.gamma_inc * sigma;
  }
  return u;
}

RunResult run(const Objective& f, const Vector& x0, const DriverConfig& cfg,
              const IterationObserver& observer) {
  cfg.validate();
  if (x0.size() != f.dim()) throw std::invalid_argument("run: x0 dimension mismatch");

  RunResult result;
  result.termination = Termination::MaxIter;

  Vector x = x0;
  double delta = cfg.delta0;
  double sigma = cfg.sigma0;
  std::vector<Vector> accepted_trace{x};
  const auto entry = subspace_catalogue(cfg.subspace_index);
  const bool needs_history = subspace_needs_history(cfg.subspace_index);

  auto fail = [&](const std::string& what) -> RunError {
    result.best_x = accepted_trace.back();
    if (!result.f_series.empty()) result.best_f = result.f_series.back();
    return RunError(what, result);
  };

  double f_k;
  Vector grad;
  try {
    f_k = f.value(x);
    grad = f.gradient(x);
  } catch (const std::exception& e) {
    throw fail(std::string("objective failed at x0: ") + e.what());
  }
  result.f_series.push_back(f_k);

  for (int k = 0; k < cfg.max_iter; ++k) {
    if (grad.norm() <= cfg.grad_tol) {
      result.termination = Termination::GradTol;
      break;
    }
    if (delta < kStallDelta) {
      result.termination = Termination::ModelStall;
      break;
    }

    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f = f_k;
    rec.grad_norm = grad.norm();
    rec.delta = delta;
    rec.sigma = sigma;

    // Step 1-2: generating model and subspace. History-based regions fall
    // back to the gradient line of the same family until two distinct
    // accepted predecessors exist.
    CubicModel p;
    try {
      p = taylor_model(f, x, entry.cubic ? cfg.sigma_sub : 0.0);
    } catch (const std::exception& e) {
      throw fail(std::string("objective failed during model build: ") + e.what());
    }

    auto history = needs_history ? history_directions(accepted_trace) : std::nullopt;
    if (history && (history->first - history->second).norm() < 1e-12) history.reset();
    SubspaceSpec spec =
        (needs_history && !history)
            ? SubspaceSpec{InspiringRegion::gradient_line(), entry.family, entry.cubic}
            : make_spec(cfg.subspace_index, history);
    rec.fallback = needs_history && !history;

    const TruncatedSubspace subspace = generate_subspace(p, spec);
    const ProjectionMatrix P = build_projection(subspace, grad);
    rec.q = P.q();

    // Whenever the subspace contains the gradient, the projection must
    // preserve its norm; the two-points family is the known exception.
    const Vector g_proj = P.columns.transpose() * grad;
    if (!std::holds_alternative<ShapeRayUnion>(subspace.shape)) {
      if (std::abs(g_proj.norm() - grad.norm()) > 1e-9 * grad.norm())
        throw fail("projection lost gradient mass on a gradient-containing subspace");
    }

    // Step 3-4: projected model. The subproblem is solved in trust-region
    // form; sigma_k enters the reported cubic model.
    CubicModel quad;
    quad.constant = f_k;
    quad.linear = g_proj;
    quad.quadratic = P.columns.transpose() * p.quadratic * P.columns;
    quad.quadratic = 0.5 * (quad.quadratic + quad.quadratic.transpose());
    quad.cubic_weight = 0.0;

    if (observer) observer(IterationView{k, x, P, quad, delta, f});

    SubproblemInstance sub{quad, delta, rebase_shape(subspace, P)};
    const StcgResult sol = solve_stcg(sub);
    rec.status = sol.status;

    CubicModel reported = quad;
    reported.cubic_weight = sigma;

    Vector y_star = sol.solution;
    RhoOutcome rho;
    try {
      rho = compute_rho(f, x, f_k, P, y_star, reported);
    } catch (const std::exception& e) {
      result.iterations.push_back(rec);
      throw fail(std::string("objective failed at trial point: ") + e.what());
    }
    rec.rho = rho.rho;

    // On a degenerate step whose model gradient grew, restart from 0.
    if (rho.degenerate &&
        grad_model(reported, y_star).norm() > grad_model(reported, Vector::Zero(rec.q)).norm())
      y_star.setZero();

    const StateUpdate upd =
        rho.degenerate ? StateUpdate{cfg.gamma_dec * delta, cfg.gamma_inc * sigma, false}
                       : update_state(rho.rho, delta, sigma, cfg);
    rec.accepted = upd.accept;
    delta = upd.delta_next;
    sigma = upd.sigma_next;

    if (upd.accept) {
      x = x + P.columns * y_star;
      f_k = rho.f_trial;
      accepted_trace.push_back(x);
      try {
        grad = f.gradient(x);
      } catch (const std::exception& e) {
        result.iterations.push_back(rec);
        throw fail(std::string("objective failed at accepted point: ") + e.what());
      }
    }
    result.iterations.push_back(rec);
    result.f_series.push_back(f_k);
  }

  if (result.termination == Termination::MaxIter) {
    // The loop may have exhausted its budget right as it converged.
    if (grad.norm() <= cfg.grad_tol) result.termination = Termination::GradTol;
  }

  result.best_x = x;
  result.best_f = f_k;
  return result;
}

}  // namespace mdlambo
