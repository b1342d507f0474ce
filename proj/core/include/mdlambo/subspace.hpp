#pragma once

#include "mdlambo/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mdlambo {

/// Where the generating model's gradients are sampled from.
enum class RegionKind { UnitBall, GradientLine, TwoPoints, TwoLines, PlaneSpan };

/// Type1 takes the union of spans of model gradients; Type2 takes the
/// span of their union.
enum class Family { Type1, Type2 };

/// Inspiring region W. s1/s2 are the normalized history directions and
/// must be unit vectors when the region uses them.
struct InspiringRegion {
  RegionKind kind;
  std::optional<Vector> s1;
  std::optional<Vector> s2;

  static InspiringRegion unit_ball() { return {RegionKind::UnitBall, {}, {}}; }
  static InspiringRegion gradient_line() { return {RegionKind::GradientLine, {}, {}}; }
  static InspiringRegion two_points(Vector a, Vector b) {
    return {RegionKind::TwoPoints, std::move(a), std::move(b)};
  }
  static InspiringRegion two_lines(Vector a, Vector b) {
    return {RegionKind::TwoLines, std::move(a), std::move(b)};
  }
  static InspiringRegion plane_span(Vector a, Vector b) {
    return {RegionKind::PlaneSpan, std::move(a), std::move(b)};
  }
};

struct SubspaceSpec {
  InspiringRegion region;
  Family family;
  bool cubic;  // sigma > 0 in the generating model

  /// Position in the 16-entry catalogue (1..16).
  int catalogue_index() const;
};

struct CatalogueEntry {
  RegionKind kind;
  Family family;
  bool cubic;
};

/// The 16-entry subspace catalogue. Indices follow the fixed enumeration:
/// 1-8 are the first family over {ball, gradient line, two points, plane},
/// first without then with the cubic term; 9-16 are the second family over
/// {ball, gradient line, two lines, plane} in the same order.
CatalogueEntry subspace_catalogue(int index);
std::string subspace_label(int index);
bool subspace_needs_history(int index);

/// Builds the spec for a catalogue index, substituting the history pair
/// where the region requires one. Throws when required history is absent.
SubspaceSpec make_spec(int index,
                       const std::optional<std::pair<Vector, Vector>>& history);

// --- Truncation shapes, parameters in basis coordinates ---------------

struct ShapeFull {};
/// Union of all lines through the origin at distance <= radius from
/// `center` (the cone swept by lines meeting a ball around the gradient).
struct ShapeCone {
  Vector center;
  double radius = 0.0;
};
/// {a*r1 + b*r2 : a*b >= 0} -- a pair of opposite plane sectors bounded
/// by the lines through r1 and r2.
struct ShapeSector {
  Vector r1, r2;
};
/// Union of the two lines spanned by v1 and v2.
struct ShapeRayUnion {
  Vector v1, v2;
};
/// A plane minus a line. Membership uses the closure; the punctured
/// direction is retained for inspection only.
struct ShapePuncturedPlane {
  Vector puncture_dir;
};

using TruncationShape =
    std::variant<ShapeFull, ShapeCone, ShapeSector, ShapeRayUnion, ShapePuncturedPlane>;

/// A truncated subspace: the smallest enclosing linear subspace (given by
/// an orthonormal basis) plus the truncation shape inside it.
struct TruncatedSubspace {
  Matrix ambient_basis;   // n x q, orthonormal columns
  TruncationShape shape;  // parameters in basis coordinates
  bool relaxed = false;   // true when the exact set was widened to its enclosing span

  int dim_enclosing() const { return static_cast<int>(ambient_basis.cols()); }
  int ambient_dim() const { return static_cast<int>(ambient_basis.rows()); }
};

struct ProjectionMatrix {
  Matrix columns;  // n x q, orthonormal
  int q() const { return static_cast<int>(columns.cols()); }
};

// --- Operations --------------------------------------------------------

/// Modified Gram-Schmidt with re-orthogonalization. Vectors whose
/// residual drops below tol * (input norm) are dropped. Throws when every
/// vector is numerically null.
Matrix gram_schmidt(const std::vector<Vector>& vectors, double tol = 1e-10);

/// Realizes the closed form of the subspace generated by model p under
/// the given spec. Requires p.linear != 0 and history vectors where the
/// region needs them.
TruncatedSubspace generate_subspace(const CubicModel& p, const SubspaceSpec& spec);

/// Minimum dimension of a linear manifold containing the set.
int subspace_dimension(const TruncatedSubspace& s);

/// Membership of a point (basis coordinates) in the closed truncation.
bool contains(const TruncatedSubspace& s, const Vector& y, double tol);
bool shape_contains(const TruncationShape& shape, const Vector& y, double tol);

/// Nearest feasible point to y_out: orthogonal projection onto the nearer
/// bounding line for sectors and line unions, norm-preserving rotation
/// toward the axis for cones. y_in is the last feasible iterate and is
/// kept for interface stability; the clip itself does not depend on it.
Vector boundary_clip(const TruncatedSubspace& s, const Vector& y_in, const Vector& y_out);
Vector shape_boundary_clip(const TruncationShape& shape, const Vector& y_in,
                           const Vector& y_out);

/// Orthonormal projection matrix whose first column is grad/||grad||
/// whenever grad lies in the enclosing span; the two-points family keeps
/// its generator order instead.
ProjectionMatrix build_projection(const TruncatedSubspace& s, const Vector& grad);

/// tau_k extended to all of R^n: P' (x - x_k).
Vector project_point(const ProjectionMatrix& P, const Vector& x_k, const Vector& x);

/// Re-expresses the truncation shape in the coordinates of P (which must
/// span the same subspace as s.ambient_basis).
TruncationShape rebase_shape(const TruncatedSubspace& s, const ProjectionMatrix& P);

/// True when the enclosing spans coincide to the given tolerance.
bool same_enclosing_span(const TruncatedSubspace& a, const TruncatedSubspace& b,
                         double tol = 1e-8);

/// Largest absolute eigenvalue of a symmetric matrix (operator 2-norm).
double operator_norm(const Matrix& B);

/// Generator of the gradient-line subspace at line parameter t:
/// (1 + sigma ||g|| t^2) g + t B g. This is the parabola parametrization
/// the sector construction is derived from; it agrees with
/// grad_model(p, t g) for t >= 0 and mirrors it across the gradient axis
/// for t < 0, so the swept lines fill exactly the sector.
Vector gradient_line_generator(const CubicModel& p, double t);

}  // namespace mdlambo
