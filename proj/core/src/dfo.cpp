#include "mdlambo/dfo.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mdlambo {

namespace {
int quad_basis_size(int q) { return (q + 1) * (q + 2) / 2; }
}  // namespace

InterpolationSet make_interpolation_set(int q, double radius, const Vector& center) {
  if (q <= 0) throw std::invalid_argument("make_interpolation_set: q must be positive");
  if (radius <= 0.0) throw std::invalid_argument("make_interpolation_set: radius must be positive");
  InterpolationSet set;
  set.center = center.size() == 0 ? Vector::Zero(q) : center;
  if (set.center.size() != q)
    throw std::invalid_argument("make_interpolation_set: center dimension mismatch");
  set.radius = radius;
  set.points.reserve(quad_basis_size(q));
  set.points.push_back(set.center);
  for (int i = 0; i < q; ++i) {
    Vector e = Vector::Zero(q);
    e(i) = radius;
    set.points.push_back(set.center + e);
    set.points.push_back(set.center - e);
  }
  const double diag = radius / std::sqrt(2.0);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      Vector e = Vector::Zero(q);
      e(i) = diag;
      e(j) = diag;
      set.points.push_back(set.center + e);
    }
  return set;
}

CubicModel build_interpolation_model(const Objective& f, const ProjectionMatrix& P,
                                     const Vector& x, const InterpolationSet& set) {
  const int q = set.q();
  const int m = quad_basis_size(q);
  if (static_cast<int>(set.points.size()) != m)
    throw std::invalid_argument("build_interpolation_model: point set has wrong size");
  if (P.q() != q) throw std::invalid_argument("build_interpolation_model: P/set dimension mismatch");
  if (set.radius <= 0.0) throw std::invalid_argument("build_interpolation_model: radius must be positive");

  // Assemble the monomial system in coordinates scaled by the radius so
  // poisedness is judged independently of the scale.
  Matrix V(m, m);
  Vector rhs(m);
  for (int r = 0; r < m; ++r) {
    const Vector z = (set.points[r] - set.center) / set.radius;
    int col = 0;
    V(r, col++) = 1.0;
    for (int i = 0; i < q; ++i) V(r, col++) = z(i);
    for (int i = 0; i < q; ++i)
      for (int j = i; j < q; ++j) V(r, col++) = (i == j ? 0.5 : 1.0) * z(i) * z(j);
    rhs(r) = f.value(x + P.columns * set.points[r]);
  }

  Eigen::FullPivLU<Matrix> lu(V);
  if (!lu.isInvertible())
    throw std::invalid_argument("build_interpolation_model: interpolation set is not poised");
  // Poisedness proxy: pivot-ratio estimate of the condition number.
  const Vector diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= 0.0 || diag.maxCoeff() / diag.minCoeff() > 1e8)
    throw std::invalid_argument("build_interpolation_model: interpolation matrix too ill-conditioned");

  const Vector coef = lu.solve(rhs);

  // Unscale back to model coordinates relative to the center.
  CubicModel model;
  model.cubic_weight = 0.0;
  model.linear.resize(q);
  model.quadratic.resize(q, q);
  int col = 1;
  for (int i = 0; i < q; ++i) model.linear(i) = coef(col++) / set.radius;
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      const double h = coef(col++) / (set.radius * set.radius);
      model.quadratic(i, j) = h;
      model.quadratic(j, i) = h;
    }
  model.constant = coef(0);

  // Re-center the quadratic at y = 0 when the set center is elsewhere:
  // the fit was in (y - c), expand to plain y coordinates.
  if (set.center.norm() > 0.0) {
    const Vector c = set.center;
    model.constant += -model.linear.dot(c) + 0.5 * c.dot(model.quadratic * c);
    model.linear -= model.quadratic * c;
  }
  return model;
}

PfqCertificate pfq_certify(const CubicModel& m, const Objective& f,
                           const ProjectionMatrix& P, const Vector& x, double delta,
                           int sample_count, double lipschitz_L, std::mt19937_64& rng) {
  if (delta <= 0.0) throw std::invalid_argument("pfq_certify: delta must be positive");
  const int q = m.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto errors_at = [&](const Vector& y) {
    const Vector xp = x + P.columns * y;
    PfqConstants e;
    e.kappa_ef = std::abs(f.value(xp) - eval_model(m, y));
    e.kappa_eg = (P.columns.transpose() * f.gradient(xp) - grad_model(m, y)).norm();
    e.kappa_eh = operator_norm(P.columns.transpose() * f.hessian(xp) * P.columns - m.quadratic);
    return e;
  };

  PfqCertificate cert;
  const PfqConstants e0 = errors_at(Vector::Zero(q));
  cert.at_center = {e0.kappa_ef / (delta * delta * delta), e0.kappa_eg / (delta * delta),
                    e0.kappa_eh / delta};

  PfqConstants worst{0.0, 0.0, 0.0};
  for (int s = 0; s < sample_count; ++s) {
    Vector y(q);
    for (int i = 0; i < q; ++i) y(i) = normal(rng);
    const double n = y.norm();
    if (n == 0.0) continue;
    y *= delta * std::pow(unif(rng), 1.0 / q) / n;  // uniform in the ball
    const PfqConstants e = errors_at(y);
    worst.kappa_ef = std::max(worst.kappa_ef, e.kappa_ef);
    worst.kappa_eg = std::max(worst.kappa_eg, e.kappa_eg);
    worst.kappa_eh = std::max(worst.kappa_eh, e.kappa_eh);
  }
  cert.empirical = {worst.kappa_ef / (delta * delta * delta),
                    worst.kappa_eg / (delta * delta), worst.kappa_eh / delta};

  // Single-point sufficiency: observed center errors plus the Lipschitz
  // sweep must dominate the ball-wide constants (orthonormal P has norm 1).
  const double slack = 1.0 + 1e-9;
  const double keh_bound = lipschitz_L + cert.at_center.kappa_eh;
  const double keg_bound = cert.at_center.kappa_eg + 2.0 * keh_bound;
  const double kef_bound = cert.at_center.kappa_ef + 2.0 * keg_bound;
  cert.one_point_bound_holds = cert.empirical.kappa_eh <= keh_bound * slack &&
                               cert.empirical.kappa_eg <= keg_bound * slack &&
                               cert.empirical.kappa_ef <= kef_bound * slack;
  return cert;
}

Vector truncated_newton_step(const CubicModel& h, const Vector& y, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("truncated_newton_step: delta must be positive");
  validate_model(h);
  const Vector grad = h.linear + h.quadratic * y;
  const auto q = grad.size();
  if (grad.norm() == 0.0) return Vector::Zero(q);

  Eigen::SelfAdjointEigenSolver<Matrix> es(h.quadratic);
  const double lam_min = es.eigenvalues()(0);
  if (lam_min > 0.0) {
    Vector step = -es.eigenvectors() *
                  (es.eigenvectors().transpose() * grad).cwiseQuotient(es.eigenvalues());
    const double n = step.norm();
    if (n > delta) step *= delta / n;
    return step;
  }
  // Indefinite model: clipped Cauchy step along the negative gradient.
  const double curv = grad.dot(h.quadratic * grad);
  double t = delta / grad.norm();
  if (curv > 0.0) t = std::min(t, grad.squaredNorm() / curv);
  return -t * grad;
}

double tn_step_error(const CubicModel& h1, const CubicModel& h2, const Vector& y,
                     double delta) {
  return (truncated_newton_step(h1, y, delta) - truncated_newton_step(h2, y, delta)).norm() /
         delta;
}

CubicModel perturbed_gradient_model(const CubicModel& m, double kappa_eg, double delta,
                                    std::mt19937_64& rng) {
  if (kappa_eg < 0.0 || delta <= 0.0)
    throw std::invalid_argument("perturbed_gradient_model: bad kappa_eg or delta");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double c = unif(rng);
  Vector b(m.dim());
  double n = 0.0;
  do {
    for (int i = 0; i < m.dim(); ++i) b(i) = normal(rng);
    n = b.norm();
  } while (n == 0.0);
  CubicModel out = m;
  out.linear += (kappa_eg * delta * delta * c / n) * b;
  return out;
}

}  // namespace mdlambo
