#include "mdlambo/objective.hpp"

namespace mdlambo {

double Objective::value(const Vector& x) const {
  check_dim(x);
  counts_->value.fetch_add(1, std::memory_order_relaxed);
  return value_(x);
}

Vector Objective::gradient(const Vector& x) const {
  check_dim(x);
  if (!gradient_) throw ObjectiveError("Objective: no gradient available");
  counts_->gradient.fetch_add(1, std::memory_order_relaxed);
  Vector g = gradient_(x);
  if (g.size() != dim_) throw ObjectiveError("Objective: gradient has wrong dimension");
  return g;
}

Matrix Objective::hessian(const Vector& x) const {
  check_dim(x);
  counts_->hessian.fetch_add(1, std::memory_order_relaxed);
  Matrix H;
  if (hessian_) {
    H = hessian_(x);
  } else if (hessvec_) {
    H.resize(dim_, dim_);
    Vector e = Vector::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      e(i) = 1.0;
      H.col(i) = hessvec_(x, e);
      e(i) = 0.0;
    }
  } else {
    throw ObjectiveError("Objective: no Hessian available");
  }
  if (H.rows() != dim_ || H.cols() != dim_)
    throw ObjectiveError("Objective: Hessian has wrong dimensions");
  // Symmetrize; callbacks may carry roundoff asymmetry.
  return 0.5 * (H + H.transpose());
}

}  // namespace mdlambo
