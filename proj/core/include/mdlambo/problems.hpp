#pragma once

#include "mdlambo/objective.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mdlambo {

/// One least-squares residual r_i; the objective term is r_i^2. Present
/// only on sum-of-squares members, where stochastic baselines may sample
/// blocks uniformly.
struct ResidualBlock {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct ProblemSpec {
  std::string name;
  int n = 0;
  Objective::ValueFn value;
  Objective::GradFn gradient;
  Objective::HessFn hessian;
  Vector x0;
  double f_best = 0.0;
  bool convex = false;
  std::string provenance;      // how f_best is known
  std::string variant = "base";
  std::vector<ResidualBlock> residuals;
};

Objective make_objective(const ProblemSpec& p);

/// The desk-scale registry: at least a dozen classical smooth problems
/// spanning n in {2, 4, 10, 50, 100}, each with analytic derivatives and
/// a documented best value.
std::vector<ProblemSpec> registry();

/// Registry members whose name matches the glob ('*' and '?' wildcards).
std::vector<ProblemSpec> select_problems(const std::string& glob);
bool glob_match(const std::string& pattern, const std::string& text);

struct VariantTransform {
  enum class Kind { DiagonalScaling, OrthogonalRotation, Shift, AffineCombination };
  Kind kind = Kind::OrthogonalRotation;
  Vector factors;        // DiagonalScaling: per-coordinate, all nonzero
  std::uint64_t seed = 0;  // OrthogonalRotation
  Vector shift;          // Shift
  double scale = 1.0;    // AffineCombination: scale * f + offset, scale > 0
  double offset = 0.0;

  std::string label() const;
};

/// Transformed problem with chain-ruled derivatives and mapped x0/f_best.
ProblemSpec apply_variant(const ProblemSpec& p, const VariantTransform& v);

/// A documented deterministic cycle of transforms used by the harness
/// when a run asks for problem variants.
std::vector<VariantTransform> default_variants(int count, std::uint64_t seed, int n);

/// Seeded random orthogonal matrix (QR of a Gaussian matrix).
Matrix random_orthogonal(int n, std::uint64_t seed);

}  // namespace mdlambo
