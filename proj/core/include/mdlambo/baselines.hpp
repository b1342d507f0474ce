#pragma once

#include "mdlambo/driver.hpp"

#include <deque>
#include <random>

namespace mdlambo {

struct SgdConfig {
  double lr0 = 1e-3;
  double decay_factor = 0.1;
  int decay_every = 50;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  int max_iter = 1000;
  double grad_tol = 1e-6;

  void validate() const;
};

struct LbfgsConfig {
  int memory = 20;
  int max_iter = 1000;
  double grad_tol = 1e-6;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;

  void validate() const;
};

/// Staircase learning rate: lr0 * decay_factor^floor(t / decay_every).
double sgd_learning_rate(const SgdConfig& cfg, int iteration);

/// Optional stochastic gradient estimator (finite-sum objectives sample
/// residual blocks); when absent the full gradient is used.
using GradientSampler = std::function<Vector(const Vector&, std::mt19937_64&)>;

/// Momentum gradient descent with the staircase schedule and weight
/// decay; degenerates to full-gradient steps without a sampler.
RunResult run_sgd(const Objective& f, const Vector& x0, const SgdConfig& cfg,
                  std::mt19937_64& rng, const GradientSampler& sampler = nullptr);

/// Limited-memory BFGS with two-loop recursion and Armijo backtracking.
RunResult run_lbfgs(const Objective& f, const Vector& x0, const LbfgsConfig& cfg);

/// The two-loop recursion itself: returns the quasi-Newton direction
/// -H grad for the stored (s, y) pairs, with initial scaling h0 * I.
Vector two_loop_direction(const Vector& grad, const std::deque<Vector>& s_list,
                          const std::deque<Vector>& y_list, double h0);

}  // namespace mdlambo
