#include "mdlambo/baselines.hpp"

#include <cmath>

namespace mdlambo {

void SgdConfig::validate() const {
  if (!(lr0 > 0.0) || !(decay_factor > 0.0) || decay_every < 1 || !(momentum >= 0.0) ||
      !(weight_decay >= 0.0) || max_iter < 0 || !(grad_tol > 0.0))
    throw std::invalid_argument("SgdConfig: invalid field");
}

void LbfgsConfig::validate() const {
  if (memory < 1) throw std::invalid_argument("LbfgsConfig: memory must be >= 1");
  if (max_iter < 0 || !(grad_tol > 0.0) || !(armijo_c > 0.0 && armijo_c < 1.0) ||
      !(backtrack > 0.0 && backtrack < 1.0) || max_backtracks < 1)
    throw std::invalid_argument("LbfgsConfig: invalid field");
}

double sgd_learning_rate(const SgdConfig& cfg, int iteration) {
  return cfg.lr0 * std::pow(cfg.decay_factor, iteration / cfg.decay_every);
}

namespace {
IterationRecord baseline_record(int k, const Vector& x, double fx, double gnorm,
                                double step, bool accepted) {
  IterationRecord rec;
  rec.k = k;
  rec.x = x;
  rec.f = fx;
  rec.grad_norm = gnorm;
  rec.delta = step;  // step length / learning rate stands in for the radius
  rec.sigma = 0.0;
  rec.rho = 0.0;
  rec.q = static_cast<int>(x.size());
  rec.accepted = accepted;
  rec.status = StcgStatus::Interior;
  return rec;
}
}  // namespace

RunResult run_sgd(const Objective& f, const Vector& x0, const SgdConfig& cfg,
                  std::mt19937_64& rng, const GradientSampler& sampler) {
  cfg.validate();
  RunResult result;
  Vector x = x0;
  Vector v = Vector::Zero(x.size());
  double fx = f.value(x);
  result.f_series.push_back(fx);
  result.termination = Termination::MaxIter;

  for (int t = 0; t < cfg.max_iter; ++t) {
    const Vector grad = f.gradient(x);
    if (grad.norm() <= cfg.grad_tol) {
      result.termination = Termination::GradTol;
      break;
    }
    const double lr = sgd_learning_rate(cfg, t);
    const Vector step_grad = sampler ? sampler(x, rng) : grad;
    v = cfg.momentum * v - lr * (step_grad + cfg.weight_decay * x);
    x += v;
    fx = f.value(x);
    result.iterations.push_back(baseline_record(t, x, fx, grad.norm(), lr, true));
    result.f_series.push_back(fx);
  }
  if (result.termination == Termination::MaxIter &&
      f.gradient(x).norm() <= cfg.grad_tol)
    result.termination = Termination::GradTol;
  result.best_x = x;
  result.best_f = fx;
  return result;
}

Vector two_loop_direction(const Vector& grad, const std::deque<Vector>& s_list,
                          const std::deque<Vector>& y_list, double h0) {
  Vector q = grad;
  const int m = static_cast<int>(s_list.size());
  std::vector<double> alpha(m), rho(m);
  for (int i = m - 1; i >= 0; --i) {
    rho[i] = 1.0 / y_list[i].dot(s_list[i]);
    alpha[i] = rho[i] * s_list[i].dot(q);
    q -= alpha[i] * y_list[i];
  }
  q *= h0;
  for (int i = 0; i < m; ++i) {
    const double beta = rho[i] * y_list[i].dot(q);
    q += (alpha[i] - beta) * s_list[i];
  }
  return -q;
}

RunResult run_lbfgs(const Objective& f, const Vector& x0, const LbfgsConfig& cfg) {
  cfg.validate();
  RunResult result;
  Vector x = x0;
  double fx = f.value(x);
  Vector grad = f.gradient(x);
  result.f_series.push_back(fx);
  result.termination = Termination::MaxIter;

  std::deque<Vector> s_list, y_list;
  double h0 = 1.0;

  for (int t = 0; t < cfg.max_iter; ++t) {
    if (grad.norm() <= cfg.grad_tol) {
      result.termination = Termination::GradTol;
      break;
    }
    Vector dir = two_loop_direction(grad, s_list, y_list, h0);
    double slope = grad.dot(dir);
    if (slope >= 0.0) {  // safeguard: fall back to steepest descent
      dir = -grad;
      slope = grad.dot(dir);
    }

    double step = 1.0;
    double f_new = 0.0;
    Vector x_new;
    bool ok = false;
    for (int b = 0; b < cfg.max_backtracks; ++b) {
      x_new = x + step * dir;
      f_new = f.value(x_new);
      if (f_new <= fx + cfg.armijo_c * step * slope) {
        ok = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!ok) {
      result.termination = Termination::ModelStall;
      break;
    }

    const Vector grad_new = f.gradient(x_new);
    const Vector s = x_new - x;
    const Vector y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {  // skip non-curvature-preserving pairs
      s_list.push_back(s);
      y_list.push_back(y);
      if (static_cast<int>(s_list.size()) > cfg.memory) {
        s_list.pop_front();
        y_list.pop_front();
      }
      h0 = sy / y.squaredNorm();
    }

    x = x_new;
    fx = f_new;
    grad = grad_new;
    result.iterations.push_back(
        baseline_record(t, x, fx, grad.norm(), step * dir.norm(), true));
    result.f_series.push_back(fx);
  }
  if (result.termination == Termination::MaxIter && grad.norm() <= cfg.grad_tol)
    result.termination = Termination::GradTol;
  result.best_x = x;
  result.best_f = fx;
  return result;
}

}  // namespace mdlambo
