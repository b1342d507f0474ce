#pragma once

#include "mdlambo/subspace.hpp"

#include <functional>

namespace mdlambo {

/// Trust-region subproblem restricted to a truncated subspace, expressed
/// in the q projected coordinates. The model must be quadratic
/// (cubic_weight == 0); the cubic reporting happens in the outer loop.
struct SubproblemInstance {
  CubicModel model;
  double radius = 0.0;
  TruncationShape feasible = ShapeFull{};
};

enum class StcgStatus {
  Interior,          // gradient vanished at an interior point
  TrBoundary,        // step left the trust region
  SubspaceBoundary,  // step left the truncated set, clipped back
  NegativeCurvature, // nonpositive curvature, pushed to the radius
  ZeroGradient       // g_k = 0 on entry
};
const char* to_string(StcgStatus s);

struct StcgResult {
  Vector solution;
  StcgStatus status = StcgStatus::ZeroGradient;
  double model_decrease = 0.0;  // m(0) - m(solution), always >= 0
  int iterations = 0;           // completed CG advances
};

/// One conjugate-gradient state. prev_grad_norm2 is ||g_{i-1}||^2 (zero
/// for i == 0) so the recurrence coefficients are recoverable.
struct CGState {
  Vector y;
  Vector g;
  Vector d;
  int i = 0;
  double prev_grad_norm2 = 0.0;
};

struct CgCoefficients {
  double alpha = 0.0;      // -(g'd)/(d'Bd); meaningful only when curvature > 0
  double beta_prev = 0.0;  // ||g_i||^2 / ||g_{i-1}||^2, 0 at i == 0
  double curvature = 0.0;  // d'Bd
};

/// Coefficients of the CG recurrence at the given state. Throws when the
/// search direction is zero; a nonpositive curvature is reported through
/// the struct for the caller's boundary branch.
CgCoefficients cg_coefficients(const CGState& state, const Matrix& B);

/// Truncated conjugate gradient with the extra subspace-boundary exit.
/// Always returns a feasible point with nonnegative model decrease. When
/// `iterates` is given, every accepted CG point is appended to it.
StcgResult solve_stcg(const SubproblemInstance& p, std::vector<Vector>* iterates = nullptr);

/// Global minimizer of the quadratic trust-region subproblem (any q),
/// via eigendecomposition and bisection on the boundary multiplier,
/// including the hard case.
Vector solve_trs_exact(const CubicModel& m, double radius);

using TrsOracle = std::function<Vector(const CubicModel&, double)>;

/// Certifies m(0) - m(y) >= 1/2 (m(0) - m(s*)) - 1e-10 against the
/// oracle's global subproblem solution s*. Requires q == 2.
bool half_decrease_certificate(const SubproblemInstance& p, const Vector& y,
                               const TrsOracle& oracle = solve_trs_exact);

/// Cauchy sufficient-decrease reference value
/// c1 ||g|| min(delta, ||g|| / max(1, ||B||)), for c1 in [1/2, 1].
double cauchy_bound(const CubicModel& m, double delta, double c1);

/// Diagnostic for the restrictive eigenvalue condition
/// (sum lambda_i^2)(sum 1/lambda_i) <= c on a positive definite matrix.
bool eigen_assumption_check(const Matrix& B, double c);

}  // namespace mdlambo
