#include "mdlambo/subspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mdlambo {

namespace {
constexpr double kRankTol = 1e-10;     // span deduplication
constexpr double kAngularTol = 1e-8;   // line-union membership

const CatalogueEntry kCatalogue[16] = {
    {RegionKind::UnitBall, Family::Type1, false},      // 1
    {RegionKind::GradientLine, Family::Type1, false},  // 2
    {RegionKind::TwoPoints, Family::Type1, false},     // 3
    {RegionKind::PlaneSpan, Family::Type1, false},     // 4
    {RegionKind::UnitBall, Family::Type1, true},       // 5
    {RegionKind::GradientLine, Family::Type1, true},   // 6
    {RegionKind::TwoPoints, Family::Type1, true},      // 7
    {RegionKind::PlaneSpan, Family::Type1, true},      // 8
    {RegionKind::UnitBall, Family::Type2, false},      // 9
    {RegionKind::GradientLine, Family::Type2, false},  // 10
    {RegionKind::TwoLines, Family::Type2, false},      // 11
    {RegionKind::PlaneSpan, Family::Type2, false},     // 12
    {RegionKind::UnitBall, Family::Type2, true},       // 13
    {RegionKind::GradientLine, Family::Type2, true},   // 14
    {RegionKind::TwoLines, Family::Type2, true},       // 15
    {RegionKind::PlaneSpan, Family::Type2, true},      // 16
};

const char* region_label(RegionKind k) {
  switch (k) {
    case RegionKind::UnitBall: return "ball";
    case RegionKind::GradientLine: return "gradline";
    case RegionKind::TwoPoints: return "twopoints";
    case RegionKind::TwoLines: return "twolines";
    case RegionKind::PlaneSpan: return "plane";
  }
  return "?";
}

void require_unit(const Vector& s, const char* name) {
  if (std::abs(s.norm() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string("InspiringRegion: ") + name +
                                " must be a unit vector");
}
}  // namespace

double operator_norm(const Matrix& B) {
  if (B.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (B + B.transpose()),
                                           Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Vector gradient_line_generator(const CubicModel& p, double t) {
  const Vector& g = p.linear;
  return (1.0 + p.cubic_weight * g.norm() * t * t) * g + t * (p.quadratic * g);
}

int SubspaceSpec::catalogue_index() const {
  for (int i = 1; i <= 16; ++i) {
    const auto& e = kCatalogue[i - 1];
    if (e.kind == region.kind && e.family == family && e.cubic == cubic) return i;
  }
  throw std::invalid_argument("SubspaceSpec: (region, family, cubic) is not a catalogue entry");
}

CatalogueEntry subspace_catalogue(int index) {
  if (index < 1 || index > 16)
    throw std::invalid_argument("subspace index must be in 1..16, got " +
                                std::to_string(index));
  return kCatalogue[index - 1];
}

std::string subspace_label(int index) {
  const auto e = subspace_catalogue(index);
  std::string s = region_label(e.kind);
  s += e.family == Family::Type1 ? "/t1" : "/t2";
  s += e.cubic ? "/cubic" : "/quad";
  return s;
}

bool subspace_needs_history(int index) {
  const auto k = subspace_catalogue(index).kind;
  return k == RegionKind::TwoPoints || k == RegionKind::TwoLines ||
         k == RegionKind::PlaneSpan;
}

SubspaceSpec make_spec(int index,
                       const std::optional<std::pair<Vector, Vector>>& history) {
  const auto e = subspace_catalogue(index);
  InspiringRegion region{e.kind, {}, {}};
  if (subspace_needs_history(index)) {
    if (!history)
      throw std::invalid_argument("subspace " + std::to_string(index) +
                                  " requires history directions s1, s2");
    region.s1 = history->first;
    region.s2 = history->second;
  }
  return SubspaceSpec{std::move(region), e.family, e.cubic};
}

Matrix gram_schmidt(const std::vector<Vector>& vectors, double tol) {
  if (vectors.empty()) throw std::invalid_argument("gram_schmidt: empty input");
  const auto n = vectors.front().size();
  Matrix Q(n, vectors.size());
  int q = 0;
  for (const Vector& v : vectors) {
    if (v.size() != n) throw std::invalid_argument("gram_schmidt: mixed dimensions");
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize once
      for (int j = 0; j < q; ++j) w -= Q.col(j).dot(w) * Q.col(j);
    if (w.norm() < tol * vnorm) continue;  // numerically dependent
    Q.col(q++) = w / w.norm();
  }
  if (q == 0) throw std::invalid_argument("gram_schmidt: all vectors are numerically null");
  return Q.leftCols(q);
}

namespace {

TruncatedSubspace full_over(std::vector<Vector> gens, bool relaxed = false) {
  TruncatedSubspace ts;
  ts.ambient_basis = gram_schmidt(gens, kRankTol);
  ts.shape = ShapeFull{};
  ts.relaxed = relaxed;
  return ts;
}

}  // namespace

TruncatedSubspace generate_subspace(const CubicModel& p, const SubspaceSpec& spec) {
  validate_model(p);
  const Vector& g = p.linear;
  const Matrix& B = p.quadratic;
  const double sigma = p.cubic_weight;
  const auto n = g.size();

  if (g.norm() == 0.0)
    throw std::invalid_argument("generate_subspace: model gradient at 0 must be nonzero");
  if (spec.cubic != (sigma > 0.0))
    throw std::invalid_argument("generate_subspace: spec.cubic disagrees with model cubic_weight");

  const bool needs_history = spec.region.kind == RegionKind::TwoPoints ||
                             spec.region.kind == RegionKind::TwoLines ||
                             spec.region.kind == RegionKind::PlaneSpan;
  if (needs_history) {
    if (!spec.region.s1 || !spec.region.s2)
      throw std::invalid_argument("generate_subspace: region requires history vectors s1, s2");
    require_unit(*spec.region.s1, "s1");
    require_unit(*spec.region.s2, "s2");
  }
  if (spec.family == Family::Type1 && spec.region.kind == RegionKind::TwoLines)
    throw std::invalid_argument("generate_subspace: two-lines region belongs to the second family");
  if (spec.family == Family::Type2 && spec.region.kind == RegionKind::TwoPoints)
    throw std::invalid_argument("generate_subspace: two-points region belongs to the first family");

  TruncatedSubspace ts;

  if (spec.region.kind == RegionKind::UnitBall) {
    // Ball-driven subspaces span all of R^n; keep the identity basis.
    ts.ambient_basis = Matrix::Identity(n, n);
    if (spec.family == Family::Type2) {
      ts.shape = ShapeFull{};
    } else {
      const double radius = sigma == 0.0
                                ? operator_norm(B)
                                : operator_norm(B + sigma * Matrix::Identity(n, n));
      ts.shape = ShapeCone{g, radius};
    }
    return ts;
  }

  if (spec.region.kind == RegionKind::GradientLine) {
    const Vector Bg = B * g;
    ts.ambient_basis = gram_schmidt({g, Bg}, kRankTol);
    if (spec.family == Family::Type2 || ts.dim_enclosing() < 2) {
      // Degenerate Bg parallel to g: the set collapses to the full line.
      ts.shape = ShapeFull{};
    } else if (sigma == 0.0) {
      ts.shape = ShapePuncturedPlane{ts.ambient_basis.transpose() * Bg};
    } else {
      const double root = std::sqrt(sigma * g.norm());
      const Vector r1 = 2.0 * g + Bg / root;
      const Vector r2 = 2.0 * g - Bg / root;
      ts.shape = ShapeSector{ts.ambient_basis.transpose() * r1,
                             ts.ambient_basis.transpose() * r2};
    }
    return ts;
  }

  const Vector& s1 = *spec.region.s1;
  const Vector& s2 = *spec.region.s2;

  if (spec.region.kind == RegionKind::TwoPoints) {
    const Vector v1 = grad_model(p, s1);
    const Vector v2 = grad_model(p, s2);
    const double scale = std::max({v1.norm(), v2.norm(), 1e-300});
    std::vector<Vector> gens;
    if (v1.norm() > 1e-14 * scale) gens.push_back(v1);
    if (v2.norm() > 1e-14 * scale) gens.push_back(v2);
    if (gens.empty())
      throw std::invalid_argument("generate_subspace: both point gradients vanish");
    ts.ambient_basis = gram_schmidt(gens, kRankTol);
    ts.shape = ShapeRayUnion{ts.ambient_basis.transpose() * v1,
                             ts.ambient_basis.transpose() * v2};
    return ts;
  }

  // TwoLines / PlaneSpan: spans over {g, Bs_i} plus {s_i} when the cubic
  // term contributes directions.
  std::vector<Vector> gens{g, B * s1, B * s2};
  if (sigma > 0.0) {
    gens.push_back(s1);
    gens.push_back(s2);
  }
  const bool relaxed =
      spec.family == Family::Type1 && spec.region.kind == RegionKind::PlaneSpan && sigma > 0.0;
  return full_over(std::move(gens), relaxed);
}

int subspace_dimension(const TruncatedSubspace& s) {
  if (const auto* ray = std::get_if<ShapeRayUnion>(&s.shape)) {
    if (s.dim_enclosing() <= 1) return 1;
    const double n1 = ray->v1.norm(), n2 = ray->v2.norm();
    if (n1 == 0.0 || n2 == 0.0) return 1;
    // Independent lines span a plane; parallel ones a single line.
    Vector u = ray->v1 / n1;
    Vector r = ray->v2 / n2;
    r -= u.dot(r) * u;
    return r.norm() > kRankTol ? 2 : 1;
  }
  return s.dim_enclosing();
}

bool shape_contains(const TruncationShape& shape, const Vector& y, double tol) {
  if (std::holds_alternative<ShapeFull>(shape) ||
      std::holds_alternative<ShapePuncturedPlane>(shape))
    return true;

  const double ny = y.norm();
  if (ny == 0.0) return true;

  if (const auto* cone = std::get_if<ShapeCone>(&shape)) {
    const Vector yhat = y / ny;
    const double dist = (cone->center - cone->center.dot(yhat) * yhat).norm();
    return dist <= cone->radius + tol;
  }

  if (const auto* sec = std::get_if<ShapeSector>(&shape)) {
    const double nr1 = sec->r1.norm(), nr2 = sec->r2.norm();
    if (y.size() != 2 || nr1 == 0.0 || nr2 == 0.0)
      throw std::invalid_argument("shape_contains: malformed sector");
    Eigen::Matrix2d R;
    R.col(0) = sec->r1 / nr1;
    R.col(1) = sec->r2 / nr2;
    const double det = R.determinant();
    if (std::abs(det) < 1e-14) {
      // Collapsed sector: treat as the union of its bounding lines.
      return shape_contains(ShapeRayUnion{sec->r1, sec->r2}, y, tol);
    }
    const Eigen::Vector2d ab = R.inverse() * (y / ny);
    return ab(0) * ab(1) >= -tol;
  }

  const auto& ray = std::get<ShapeRayUnion>(shape);
  for (const Vector* v : {&ray.v1, &ray.v2}) {
    const double nv = v->norm();
    if (nv == 0.0) continue;
    const Vector u = *v / nv;
    if ((y - u.dot(y) * u).norm() <= tol * ny) return true;
  }
  return false;
}

bool contains(const TruncatedSubspace& s, const Vector& y, double tol) {
  if (y.size() != s.dim_enclosing())
    throw std::invalid_argument("contains: point must be in basis coordinates");
  return shape_contains(s.shape, y, tol);
}

namespace {

Vector nearer_line_projection(const Vector& a, const Vector& b, const Vector& y) {
  const double na = a.norm(), nb = b.norm();
  Vector pa = Vector::Zero(y.size());
  Vector pb = Vector::Zero(y.size());
  if (na > 0.0) {
    const Vector u = a / na;
    pa = u.dot(y) * u;
  }
  if (nb > 0.0) {
    const Vector u = b / nb;
    pb = u.dot(y) * u;
  }
  return (y - pa).norm() <= (y - pb).norm() ? pa : pb;
}

}  // namespace

Vector shape_boundary_clip(const TruncationShape& shape, const Vector& /*y_in*/,
                           const Vector& y_out) {
  if (shape_contains(shape, y_out, 0.0)) return y_out;

  if (const auto* sec = std::get_if<ShapeSector>(&shape))
    return nearer_line_projection(sec->r1, sec->r2, y_out);

  if (const auto* ray = std::get_if<ShapeRayUnion>(&shape))
    return nearer_line_projection(ray->v1, ray->v2, y_out);

  const auto& cone = std::get<ShapeCone>(shape);
  const double nc = cone.center.norm();
  const double ny = y_out.norm();
  if (nc == 0.0 || ny == 0.0) return y_out;
  const Vector chat = cone.center / nc;
  const double t = y_out.dot(chat);
  const Vector axis = t >= 0.0 ? chat : Vector(-chat);
  Vector w = y_out - y_out.dot(axis) * axis;
  const double nw = w.norm();
  if (nw == 0.0) return y_out;  // on the axis, already inside
  // Rotate toward the axis until the line through the result is tangent
  // to the ball around the center; the norm is preserved.
  const double theta = std::asin(std::clamp(cone.radius / nc, 0.0, 1.0));
  return ny * (std::cos(theta) * axis + std::sin(theta) * (w / nw));
}

Vector boundary_clip(const TruncatedSubspace& s, const Vector& y_in, const Vector& y_out) {
  return shape_boundary_clip(s.shape, y_in, y_out);
}

ProjectionMatrix build_projection(const TruncatedSubspace& s, const Vector& grad) {
  if (grad.norm() == 0.0)
    throw std::invalid_argument("build_projection: gradient must be nonzero");
  if (grad.size() != s.ambient_dim())
    throw std::invalid_argument("build_projection: gradient dimension mismatch");

  const Matrix& A = s.ambient_basis;

  if (const auto* ray = std::get_if<ShapeRayUnion>(&s.shape)) {
    // Two-points subspaces need not contain the gradient; keep the
    // generator order instead of forcing a gradient-first column.
    std::vector<Vector> gens;
    if (ray->v1.norm() > 0.0) gens.push_back(A * ray->v1);
    if (ray->v2.norm() > 0.0) gens.push_back(A * ray->v2);
    return ProjectionMatrix{gram_schmidt(gens, kRankTol)};
  }

  const Vector residual = grad - A * (A.transpose() * grad);
  if (residual.norm() > 1e-8 * grad.norm()) {
    // Gradient unexpectedly outside the span: fall back to the basis.
    return ProjectionMatrix{A};
  }

  std::vector<Vector> gens;
  gens.reserve(A.cols() + 1);
  gens.push_back(grad);
  for (int j = 0; j < A.cols(); ++j) gens.push_back(A.col(j));
  Matrix Q = gram_schmidt(gens, kRankTol);
  if (Q.cols() > A.cols()) Q = Q.leftCols(A.cols());
  return ProjectionMatrix{std::move(Q)};
}

Vector project_point(const ProjectionMatrix& P, const Vector& x_k, const Vector& x) {
  if (x.size() != P.columns.rows() || x_k.size() != P.columns.rows())
    throw std::invalid_argument("project_point: dimension mismatch");
  return P.columns.transpose() * (x - x_k);
}

TruncationShape rebase_shape(const TruncatedSubspace& s, const ProjectionMatrix& P) {
  if (P.q() != s.dim_enclosing() || P.columns.rows() != s.ambient_dim())
    throw std::invalid_argument("rebase_shape: projection does not match the subspace");
  const Matrix R = P.columns.transpose() * s.ambient_basis;  // orthogonal q x q
  return std::visit(
      [&R](const auto& sh) -> TruncationShape {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, ShapeFull>) return sh;
        else if constexpr (std::is_same_v<T, ShapeCone>) return ShapeCone{R * sh.center, sh.radius};
        else if constexpr (std::is_same_v<T, ShapeSector>) return ShapeSector{R * sh.r1, R * sh.r2};
        else if constexpr (std::is_same_v<T, ShapeRayUnion>) return ShapeRayUnion{R * sh.v1, R * sh.v2};
        else return ShapePuncturedPlane{R * sh.puncture_dir};
      },
      s.shape);
}

bool same_enclosing_span(const TruncatedSubspace& a, const TruncatedSubspace& b, double tol) {
  if (a.dim_enclosing() != b.dim_enclosing() || a.ambient_dim() != b.ambient_dim())
    return false;
  const Matrix& A = a.ambient_basis;
  const Matrix& Bm = b.ambient_basis;
  const double ra = (A - Bm * (Bm.transpose() * A)).norm();
  const double rb = (Bm - A * (A.transpose() * Bm)).norm();
  return ra <= tol && rb <= tol;
}

}  // namespace mdlambo
