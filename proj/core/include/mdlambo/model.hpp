#pragma once

#include "mdlambo/objective.hpp"

namespace mdlambo {

/// Local model p(s) = c + g's + 1/2 s'Bs + (sigma/3)||s||^3.
///
/// With cubic_weight == 0 this is the plain quadratic model used by the
/// subproblem solver; with cubic_weight > 0 it is the cubic-regularized
/// model used for subspace construction and step-quality reporting.
struct CubicModel {
  double constant = 0.0;   // c
  Vector linear;           // g
  Matrix quadratic;        // B, symmetric
  double cubic_weight = 0.0;  // sigma >= 0

  int dim() const { return static_cast<int>(linear.size()); }
};

/// p(s); throws on dimension mismatch.
double eval_model(const CubicModel& m, const Vector& s);

/// grad p(s) = g + (B + sigma*||s||*I) s.
Vector grad_model(const CubicModel& m, const Vector& s);

/// Second-order Taylor model of f at x with the given cubic weight:
/// c = f(x), g = grad f(x), B = hess f(x).
CubicModel taylor_model(const Objective& f, const Vector& x, double sigma);

/// Checks the structural invariants (symmetry, sigma >= 0); throws
/// std::invalid_argument on violation. Used by solver entry points.
void validate_model(const CubicModel& m);

}  // namespace mdlambo
