#include "mdlambo/model.hpp"

#include <cmath>

namespace mdlambo {

namespace {
void check_dims(const CubicModel& m, const Vector& s, const char* where) {
  if (m.quadratic.rows() != m.linear.size() || m.quadratic.cols() != m.linear.size())
    throw std::invalid_argument(std::string(where) + ": model fields disagree in dimension");
  if (s.size() != m.linear.size())
    throw std::invalid_argument(std::string(where) + ": point dimension mismatch");
}
}  // namespace

double eval_model(const CubicModel& m, const Vector& s) {
  check_dims(m, s, "eval_model");
  const double quad = 0.5 * s.dot(m.quadratic * s);
  const double ns = s.norm();
  return m.constant + m.linear.dot(s) + quad + (m.cubic_weight / 3.0) * ns * ns * ns;
}

Vector grad_model(const CubicModel& m, const Vector& s) {
  check_dims(m, s, "grad_model");
  return m.linear + m.quadratic * s + (m.cubic_weight * s.norm()) * s;
}

CubicModel taylor_model(const Objective& f, const Vector& x, double sigma) {
  if (!f.has_gradient() || !f.has_hessian())
    throw ObjectiveError("taylor_model: objective lacks derivatives; use the interpolation layer");
  if (sigma < 0.0) throw std::invalid_argument("taylor_model: sigma must be >= 0");
  CubicModel m;
  m.constant = f.value(x);
  m.linear = f.gradient(x);
  m.quadratic = f.hessian(x);
  m.cubic_weight = sigma;
  return m;
}

void validate_model(const CubicModel& m) {
  if (m.cubic_weight < 0.0) throw std::invalid_argument("CubicModel: cubic_weight < 0");
  if (m.quadratic.rows() != m.linear.size() || m.quadratic.cols() != m.linear.size())
    throw std::invalid_argument("CubicModel: inconsistent dimensions");
  const double scale = std::max(1.0, m.quadratic.norm());
  if ((m.quadratic - m.quadratic.transpose()).norm() > 1e-12 * scale)
    throw std::invalid_argument("CubicModel: quadratic term is not symmetric");
}

}  // namespace mdlambo
