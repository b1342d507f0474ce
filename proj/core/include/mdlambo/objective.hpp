#pragma once

#include <Eigen/Core>

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace mdlambo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an objective callback fails or required derivative
/// information is missing.
class ObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation counters, shared between copies of an Objective so that
/// concurrent benchmark workers can bump them safely.
struct EvalCounts {
  std::atomic<long> value{0};
  std::atomic<long> gradient{0};
  std::atomic<long> hessian{0};
};

/// A smooth objective f : R^n -> R with optional derivative callbacks.
///
/// Gradient and Hessian are optional; code that needs them when absent
/// must go through the interpolation-model layer instead. A
/// Hessian-vector product can stand in for a dense Hessian, in which
/// case hessian() assembles the dense matrix column by column (n
/// products, the documented cost).
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;
  using HessVecFn = std::function<Vector(const Vector&, const Vector&)>;

  Objective(int dim, ValueFn value, GradFn gradient = nullptr,
            HessFn hessian = nullptr, HessVecFn hessvec = nullptr)
      : dim_(dim),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)),
        hessvec_(std::move(hessvec)),
        counts_(std::make_shared<EvalCounts>()) {
    if (dim_ <= 0) throw std::invalid_argument("Objective: dim must be positive");
    if (!value_) throw std::invalid_argument("Objective: value callback required");
  }

  int dim() const { return dim_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }
  bool has_hessian() const { return static_cast<bool>(hessian_) || static_cast<bool>(hessvec_); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Dense symmetric Hessian; assembled from the Hessian-vector product
  /// when no dense callback was supplied.
  Matrix hessian(const Vector& x) const;

  const EvalCounts& counts() const { return *counts_; }

 private:
  void check_dim(const Vector& x) const {
    if (x.size() != dim_)
      throw std::invalid_argument("Objective: point has dimension " +
                                  std::to_string(x.size()) + ", expected " +
                                  std::to_string(dim_));
  }

  int dim_;
  ValueFn value_;
  GradFn gradient_;
  HessFn hessian_;
  HessVecFn hessvec_;
  std::shared_ptr<EvalCounts> counts_;
};

}  // namespace mdlambo
