#pragma once

#include "mdlambo/subspace.hpp"

#include <random>

namespace mdlambo {

/// Quadratic interpolation point set in q projected coordinates:
/// exactly (q+1)(q+2)/2 points, the first being the center.
struct InterpolationSet {
  Vector center;
  std::vector<Vector> points;
  double radius = 0.0;

  int q() const { return static_cast<int>(center.size()); }
};

/// Standard poised layout: center, +-radius e_i, and radius (e_i+e_j)/sqrt(2).
InterpolationSet make_interpolation_set(int q, double radius,
                                        const Vector& center = Vector());

/// Unique quadratic through f(x + P y_i) on the set, solved from the
/// scaled monomial system with full pivoting. Throws when the set is not
/// poised (condition number above 1e8).
CubicModel build_interpolation_model(const Objective& f, const ProjectionMatrix& P,
                                     const Vector& x, const InterpolationSet& set);

struct PfqConstants {
  double kappa_ef = 0.0;
  double kappa_eg = 0.0;
  double kappa_eh = 0.0;
};

struct PfqCertificate {
  PfqConstants empirical;     // max sampled error / delta^power, powers (3, 2, 1)
  PfqConstants at_center;     // single-point ratios at y = 0
  bool one_point_bound_holds = false;  // ball-wide errors within the
                                       // Lipschitz-driven single-point bounds
};

/// Samples the three model-error kinds over the ball of the given radius
/// and certifies them, including the one-point sufficiency check driven
/// by the Hessian Lipschitz bound L.
PfqCertificate pfq_certify(const CubicModel& m, const Objective& f,
                           const ProjectionMatrix& P, const Vector& x, double delta,
                           int sample_count, double lipschitz_L, std::mt19937_64& rng);

/// Truncated Newton step of a quadratic model from point y: the Newton
/// step when the Hessian is positive definite, clipped to norm delta;
/// the clipped Cauchy step otherwise.
Vector truncated_newton_step(const CubicModel& h, const Vector& y, double delta);

/// ||N(h1, y, delta) - N(h2, y, delta)|| / delta, always in [0, 2].
double tn_step_error(const CubicModel& h1, const CubicModel& h2, const Vector& y,
                     double delta);

/// Shifts the model gradient by kappa_eg * delta^2 * c * b/||b|| with
/// c ~ U[0,1] and b standard normal -- the stochastic closeness model
/// between interpolation and derivative-based quadratics.
CubicModel perturbed_gradient_model(const CubicModel& m, double kappa_eg, double delta,
                                    std::mt19937_64& rng);

}  // namespace mdlambo
