#include "mdlambo/stcg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace mdlambo {

namespace {
constexpr double kMembershipTol = 1e-8;

double quad_value(const CubicModel& m, const Vector& y) {
  return m.linear.dot(y) + 0.5 * y.dot(m.quadratic * y);
}

// Larger root of ||y + alpha d|| = radius; requires ||y|| <= radius.
double boundary_alpha(const Vector& y, const Vector& d, double radius) {
  const double a = d.squaredNorm();
  if (a <= 0.0) return 0.0;
  const double b = 2.0 * y.dot(d);
  const double c = y.squaredNorm() - radius * radius;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  return (-b + std::sqrt(disc)) / (2.0 * a);
}

// Every truncation shape contains the full line through any of its
// points, so a clipped exit point may be slid along its own line to the
// model minimizer within the radius. The raw nearest-point projection
// frequently lands on an ascent point and would stall the outer loop.
Vector polish_along_line(const CubicModel& m, const Vector& w, double radius) {
  const double nw = w.norm();
  if (nw == 0.0) return w;
  const Vector u = w / nw;
  const double slope = m.linear.dot(u);
  const double curv = u.dot(m.quadratic * u);
  double t;
  if (curv > 0.0)
    t = std::clamp(-slope / curv, -radius, radius);
  else
    t = slope > 0.0 ? -radius : radius;
  return t * u;
}
}  // namespace

const char* to_string(StcgStatus s) {
  switch (s) {
    case StcgStatus::Interior: return "interior";
    case StcgStatus::TrBoundary: return "tr_boundary";
    case StcgStatus::SubspaceBoundary: return "subspace_boundary";
    case StcgStatus::NegativeCurvature: return "negative_curvature";
    case StcgStatus::ZeroGradient: return "zero_gradient";
  }
  return "?";
}

CgCoefficients cg_coefficients(const CGState& state, const Matrix& B) {
  if (state.d.size() == 0 || state.d.norm() == 0.0)
    throw std::invalid_argument("cg_coefficients: search direction is zero");
  CgCoefficients out;
  out.curvature = state.d.dot(B * state.d);
  out.alpha = out.curvature != 0.0 ? -state.g.dot(state.d) / out.curvature
                                   : std::numeric_limits<double>::infinity();
  out.beta_prev =
      state.prev_grad_norm2 > 0.0 ? state.g.squaredNorm() / state.prev_grad_norm2 : 0.0;
  return out;
}

StcgResult solve_stcg(const SubproblemInstance& p, std::vector<Vector>* iterates) {
  validate_model(p.model);
  if (p.model.cubic_weight != 0.0)
    throw std::invalid_argument("solve_stcg: subproblem model must be quadratic");
  if (p.radius <= 0.0) throw std::invalid_argument("solve_stcg: radius must be positive");

  const Vector& g0 = p.model.linear;
  const Matrix& B = p.model.quadratic;
  const auto q = g0.size();
  const double grad_tol = 1e-12 * std::max(1.0, g0.norm());

  StcgResult res;
  res.solution = Vector::Zero(q);
  if (g0.norm() <= grad_tol) {
    res.status = StcgStatus::ZeroGradient;
    return res;
  }

  Vector y = Vector::Zero(q);
  Vector g = g0;
  Vector d = -g0;

  // Exit candidate: clamp to the radius (every shape is closed under
  // scaling toward the origin), enforce membership, and never return a
  // point worse than the last CG iterate.
  auto finish = [&](Vector candidate, StcgStatus status, int iters) {
    const double nc = candidate.norm();
    if (nc > p.radius) candidate *= p.radius / nc;
    if (!shape_contains(p.feasible, candidate, kMembershipTol))
      candidate = shape_boundary_clip(p.feasible, y, candidate);
    if (quad_value(p.model, candidate) > quad_value(p.model, y)) candidate = y;
    res.solution = std::move(candidate);
    res.status = status;
    res.model_decrease = -quad_value(p.model, res.solution);
    res.model_decrease = std::max(res.model_decrease, 0.0);
    res.iterations = iters;
    return res;
  };

  const int max_steps = std::max<int>(40, 4 * static_cast<int>(q));
  for (int i = 0; i < max_steps; ++i) {
    if (g.norm() <= grad_tol) return finish(y, StcgStatus::Interior, i);

    const double curvature = d.dot(B * d);
    if (curvature <= 1e-14 * d.squaredNorm()) {
      const double alpha_star = boundary_alpha(y, d, p.radius);
      return finish(y + alpha_star * d, StcgStatus::NegativeCurvature, i);
    }

    const double alpha = -g.dot(d) / curvature;
    const Vector trial = y + alpha * d;

    if (!shape_contains(p.feasible, trial, kMembershipTol)) {
      Vector clipped = shape_boundary_clip(p.feasible, y, trial);
      clipped = polish_along_line(p.model, clipped, p.radius);
      return finish(std::move(clipped), StcgStatus::SubspaceBoundary, i);
    }
    if (trial.norm() > p.radius) {
      const double alpha_star = boundary_alpha(y, d, p.radius);
      return finish(y + alpha_star * d, StcgStatus::TrBoundary, i);
    }

    const Vector g_next = B * trial + g0;
    const double beta = g_next.squaredNorm() / g.squaredNorm();
    d = -g_next + beta * d;
    y = trial;
    g = g_next;
    if (iterates) iterates->push_back(y);
  }
  return finish(y, StcgStatus::Interior, max_steps);
}

Vector solve_trs_exact(const CubicModel& m, double radius) {
  validate_model(m);
  if (m.cubic_weight != 0.0)
    throw std::invalid_argument("solve_trs_exact: model must be quadratic");
  if (radius <= 0.0) throw std::invalid_argument("solve_trs_exact: radius must be positive");

  const auto q = m.linear.size();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.quadratic);
  const Vector lambda = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  const Vector gbar = Q.transpose() * m.linear;
  const double lam_min = lambda(0);

  // Interior Newton point when the Hessian is positive definite.
  if (lam_min > 0.0) {
    Vector s = -gbar.cwiseQuotient(lambda);
    if (s.norm() <= radius) return Q * s;
  }

  const double lo = std::max(0.0, -lam_min);
  auto step_norm = [&](double mu) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) {
      const double denom = lambda(i) + mu;
      if (denom <= 0.0) return std::numeric_limits<double>::infinity();
      const double t = gbar(i) / denom;
      sum += t * t;
    }
    return std::sqrt(sum);
  };

  // Norm of the pseudo-inverse step at mu = lo (components in the null
  // directions dropped); finite there means the hard case is possible.
  auto step_norm_limit = [&]() {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) {
      const double denom = lambda(i) + lo;
      if (std::abs(denom) <= 1e-12 * std::max(1.0, std::abs(lam_min))) {
        if (std::abs(gbar(i)) > 1e-12 * std::max(1.0, m.linear.norm()))
          return std::numeric_limits<double>::infinity();
        continue;
      }
      const double t = gbar(i) / denom;
      sum += t * t;
    }
    return std::sqrt(sum);
  };

  const double limit_norm = step_norm_limit();
  if (limit_norm <= radius) {
    // Hard case: pseudo-inverse step plus a null-direction component
    // stretched to the boundary.
    Vector s(q);
    for (Eigen::Index i = 0; i < q; ++i) {
      const double denom = lambda(i) + lo;
      s(i) = std::abs(denom) <= 1e-12 * std::max(1.0, std::abs(lam_min))
                 ? 0.0
                 : -gbar(i) / denom;
    }
    const double tau = std::sqrt(std::max(0.0, radius * radius - s.squaredNorm()));
    s(0) += tau;  // eigenvalues ascend, index 0 is the most negative
    return Q * s;
  }

  double a = lo;
  double b = lo + std::max(1.0, m.linear.norm() / radius + std::abs(lambda(q - 1)));
  while (step_norm(b) > radius) b = lo + 2.0 * (b - lo);
  // step_norm decreases in mu: > radius at a+, < radius at b.
  for (int it = 0; it < 400 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
    const double mid = 0.5 * (a + b);
    (step_norm(mid) > radius ? a : b) = mid;
  }
  const double mu = 0.5 * (a + b);
  Vector s(q);
  for (Eigen::Index i = 0; i < q; ++i) s(i) = -gbar(i) / (lambda(i) + mu);
  return Q * s;
}

bool half_decrease_certificate(const SubproblemInstance& p, const Vector& y,
                               const TrsOracle& oracle) {
  if (p.model.dim() != 2)
    throw std::invalid_argument("half_decrease_certificate: requires q == 2");
  const Vector s_star = oracle(p.model, p.radius);
  if (s_star.size() != 2) throw std::runtime_error("half_decrease_certificate: oracle failed");
  const double dec_y = -quad_value(p.model, y);
  const double dec_star = -quad_value(p.model, s_star);
  return dec_y >= 0.5 * dec_star - 1e-10;
}

double cauchy_bound(const CubicModel& m, double delta, double c1) {
  if (c1 < 0.5 || c1 > 1.0)
    throw std::invalid_argument("cauchy_bound: c1 must lie in [1/2, 1]");
  const double gn = m.linear.norm();
  if (gn == 0.0) return 0.0;
  const double bn = operator_norm(m.quadratic);
  return c1 * gn * std::min(delta, gn / std::max(1.0, bn));
}

bool eigen_assumption_check(const Matrix& B, double c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (B + B.transpose()),
                                           Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  double sum_sq = 0.0, sum_inv = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= 0.0) return false;
    sum_sq += ev(i) * ev(i);
    sum_inv += 1.0 / ev(i);
  }
  return sum_sq * sum_inv <= c;
}

}  // namespace mdlambo
