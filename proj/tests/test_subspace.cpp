#include "mdlambo/subspace.hpp"

#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <doctest.h>

using namespace mdlambo;

namespace {

Matrix diag2(double a, double b) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

CubicModel model_of(Vector g, Matrix B, double sigma) {
  return CubicModel{0.0, std::move(g), std::move(B), sigma};
}

// The worked instance used for the projection table: f(x) = ||x||^2 at
// x_k = e1, with s1 = e1, s2 = e2. Gradient 2 e1, Hessian 2 I.
struct TableInstance {
  int n = 4;
  Vector g = 2.0 * Vector::Unit(4, 0);
  Matrix B = 2.0 * Matrix::Identity(4, 4);
  Vector s1 = Vector::Unit(4, 0);
  Vector s2 = Vector::Unit(4, 1);
  Vector J = Vector::Ones(4);
  Vector x_k = Vector::Unit(4, 0);

  CubicModel model(double sigma) const { return CubicModel{1.0, g, B, sigma}; }
  SubspaceSpec spec(int index) const { return make_spec(index, std::make_pair(s1, s2)); }
};

bool spans_match(const Matrix& A, const std::vector<Vector>& gens) {
  std::vector<Vector> cols;
  for (int j = 0; j < A.cols(); ++j) cols.push_back(A.col(j));
  Matrix Q1 = gram_schmidt(cols, 1e-10);
  std::vector<Vector> all = cols;
  all.insert(all.end(), gens.begin(), gens.end());
  Matrix Q2 = gram_schmidt(all, 1e-8);
  Matrix Qg = gram_schmidt(gens, 1e-8);
  return Q1.cols() == Q2.cols() && Qg.cols() == Q2.cols();
}

}  // namespace

TEST_CASE("catalogue enumerates the sixteen subspaces") {
  CHECK_THROWS_AS(subspace_catalogue(0), std::invalid_argument);
  CHECK_THROWS_AS(subspace_catalogue(17), std::invalid_argument);
  for (int i = 1; i <= 16; ++i) {
    const auto e = subspace_catalogue(i);
    const SubspaceSpec spec{
        InspiringRegion{e.kind, Vector::Unit(3, 0), Vector::Unit(3, 1)}, e.family, e.cubic};
    CHECK(spec.catalogue_index() == i);
  }
  CHECK(subspace_catalogue(6).kind == RegionKind::GradientLine);
  CHECK(subspace_catalogue(6).cubic);
  CHECK(subspace_catalogue(11).kind == RegionKind::TwoLines);
  CHECK(subspace_needs_history(3));
  CHECK(subspace_needs_history(16));
  CHECK(!subspace_needs_history(1));
  CHECK(!subspace_needs_history(14));
  CHECK_THROWS_AS(make_spec(7, std::nullopt), std::invalid_argument);
}

TEST_CASE("gram_schmidt") {
  SUBCASE("orthogonalizes and normalizes") {
    Vector a(2), b(2);
    a << 2.0, 0.0;
    b << 0.0, 3.0;
    const Matrix Q = gram_schmidt({a, b});
    CHECK((Q - Matrix::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("drops numerically dependent vectors") {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << 1.0, 1e-14;
    const Matrix Q = gram_schmidt({a, b});
    CHECK(Q.cols() == 1);
    CHECK((Q.col(0) - a).norm() < 1e-14);
  }
  SUBCASE("hand computation on {g, Bg}") {
    Vector g(2), Bg(2);
    g << 1.0, 1.0;
    Bg << 1.0, 2.0;
    const Matrix Q = gram_schmidt({g, Bg});
    CHECK((Q.col(0) - g / std::sqrt(2.0)).norm() < 1e-14);
    Vector expected(2);
    expected << -1.0, 1.0;
    expected /= std::sqrt(2.0);
    CHECK((Q.col(1) - expected).norm() < 1e-12);
  }
  SUBCASE("orthonormal to 1e-10 on random stacks") {
    std::mt19937_64 rng(5);
    std::vector<Vector> vs;
    for (int i = 0; i < 12; ++i) vs.push_back(oracles::random_vector(8, rng));
    const Matrix Q = gram_schmidt(vs);
    CHECK((Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm() < 1e-10);
  }
  SUBCASE("all-null input throws") {
    CHECK_THROWS_AS(gram_schmidt({Vector::Zero(3), Vector::Zero(3)}), std::invalid_argument);
  }
}

TEST_CASE("generate_subspace closed forms") {
  SUBCASE("gradient-line without cubic term: punctured plane on span{g, Bg}") {
    Vector g(2);
    g << 1.0, 1.0;
    const auto ts =
        generate_subspace(model_of(g, diag2(1.0, 2.0), 0.0), make_spec(2, std::nullopt));
    CHECK(ts.dim_enclosing() == 2);
    Vector Bg(2);
    Bg << 1.0, 2.0;
    CHECK(spans_match(ts.ambient_basis, {g, Bg}));
    const auto* pp = std::get_if<ShapePuncturedPlane>(&ts.shape);
    REQUIRE(pp != nullptr);
    // The puncture direction is Bg expressed in basis coordinates.
    CHECK((ts.ambient_basis * pp->puncture_dir - Bg).norm() < 1e-12);
  }

  SUBCASE("gradient-line with cubic term: sector bounded by the tangent rays") {
    Vector g(2);
    g << 1.0, 1.0;
    const Matrix B = diag2(1.0, 2.0);
    const auto ts = generate_subspace(model_of(g, B, 1.0), make_spec(6, std::nullopt));
    const auto* sec = std::get_if<ShapeSector>(&ts.shape);
    REQUIRE(sec != nullptr);
    const Vector Bg = B * g;
    const double root = std::pow(2.0, 0.25);  // sqrt(sigma ||g||) with ||g|| = sqrt 2
    const Vector r1 = 2.0 * g + Bg / root;
    const Vector r2 = 2.0 * g - Bg / root;
    CHECK((ts.ambient_basis * sec->r1 - r1).norm() < 1e-12);
    CHECK((ts.ambient_basis * sec->r2 - r2).norm() < 1e-12);

    // Cross-check: every line generator lies in the sector. For t >= 0
    // the generator equals grad p(t g); for t < 0 it is its mirror image
    // across the gradient axis (same swept lines).
    const CubicModel p = model_of(g, B, 1.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ts_range(-50.0, 50.0);
    int failures = 0;
    for (int i = 0; i < 500; ++i) {
      const double t = ts_range(rng);
      const Vector gen = gradient_line_generator(p, t);
      if (!contains(ts, Vector(ts.ambient_basis.transpose() * gen), 1e-8)) ++failures;
      if (t >= 0.0)
        CHECK((gen - grad_model(p, Vector(t * g))).norm() < 1e-10 * gen.norm());
    }
    CHECK(failures == 0);
  }

  SUBCASE("unit-ball first-family shapes are cones with the operator-norm radius") {
    std::mt19937_64 rng(9);
    const Matrix B = oracles::random_spd(5, rng);
    const Vector g = oracles::random_vector(5, rng);
    const auto t0 = generate_subspace(model_of(g, B, 0.0), make_spec(1, std::nullopt));
    const auto* cone0 = std::get_if<ShapeCone>(&t0.shape);
    REQUIRE(cone0 != nullptr);
    CHECK(cone0->radius == doctest::Approx(operator_norm(B)));
    CHECK(t0.dim_enclosing() == 5);

    const auto t1 = generate_subspace(model_of(g, B, 2.0), make_spec(5, std::nullopt));
    const auto* cone1 = std::get_if<ShapeCone>(&t1.shape);
    REQUIRE(cone1 != nullptr);
    CHECK(cone1->radius == doctest::Approx(operator_norm(B + 2.0 * Matrix::Identity(5, 5))));
  }

  SUBCASE("two-points family spans the two model gradients") {
    std::mt19937_64 rng(11);
    const Matrix B = oracles::random_spd(6, rng);
    const Vector g = oracles::random_vector(6, rng);
    const Vector s1 = oracles::random_unit(6, rng);
    const Vector s2 = oracles::random_unit(6, rng);
    const CubicModel p = model_of(g, B, 1.0);
    const auto ts = generate_subspace(p, make_spec(7, std::make_pair(s1, s2)));
    const auto* ray = std::get_if<ShapeRayUnion>(&ts.shape);
    REQUIRE(ray != nullptr);
    CHECK(ts.dim_enclosing() == 2);
    CHECK((ts.ambient_basis * ray->v1 - grad_model(p, s1)).norm() < 1e-10);
    CHECK((ts.ambient_basis * ray->v2 - grad_model(p, s2)).norm() < 1e-10);
  }

  SUBCASE("table instance reproduces the expected spans") {
    const TableInstance t;
    const auto ts = generate_subspace(t.model(1.0), t.spec(15));
    CHECK(ts.dim_enclosing() == 2);
    CHECK(spans_match(ts.ambient_basis, {Vector::Unit(4, 0), Vector::Unit(4, 1)}));
  }

  SUBCASE("plane-span first family with cubic term is the relaxed 5-span") {
    std::mt19937_64 rng(23);
    const Matrix B = oracles::random_spd(8, rng);
    const Vector g = oracles::random_vector(8, rng);
    const Vector s1 = oracles::random_unit(8, rng);
    const Vector s2 = oracles::random_unit(8, rng);
    const auto ts = generate_subspace(model_of(g, B, 1.0), make_spec(8, {{s1, s2}}));
    CHECK(ts.relaxed);
    CHECK(ts.dim_enclosing() == 5);
    CHECK(spans_match(ts.ambient_basis, {g, Vector(B * s1), Vector(B * s2), s1, s2}));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(
        generate_subspace(model_of(Vector::Zero(3), Matrix::Identity(3, 3), 0.0),
                          make_spec(1, std::nullopt)),
        std::invalid_argument);
    // spec.cubic must agree with the generating model's weight
    CHECK_THROWS_AS(
        generate_subspace(model_of(Vector::Ones(3), Matrix::Identity(3, 3), 1.0),
                          make_spec(1, std::nullopt)),
        std::invalid_argument);
    // two-points region belongs to the first family only
    const SubspaceSpec bad{
        InspiringRegion::two_points(Vector::Unit(3, 0), Vector::Unit(3, 1)), Family::Type2,
        false};
    CHECK_THROWS_AS(
        generate_subspace(model_of(Vector::Ones(3), Matrix::Identity(3, 3), 0.0), bad),
        std::invalid_argument);
  }
}

TEST_CASE("subspace_dimension reproduces the dimension table") {
  std::mt19937_64 rng(31);
  const int n = 20;
  for (int inst = 0; inst < 20; ++inst) {
    const Matrix B = oracles::random_spd(n, rng);
    const Vector g = oracles::random_vector(n, rng);
    const Vector s1 = oracles::random_unit(n, rng);
    const Vector s2 = oracles::random_unit(n, rng);
    const auto hist = std::make_pair(s1, s2);
    auto dim_of = [&](int idx, double sigma) {
      return subspace_dimension(generate_subspace(model_of(g, B, sigma), make_spec(idx, hist)));
    };
    CHECK(dim_of(1, 0.0) == n);
    CHECK(dim_of(2, 0.0) == 2);
    CHECK(dim_of(3, 0.0) == 2);
    CHECK(dim_of(4, 0.0) == 3);
    CHECK(dim_of(5, 1.0) == n);
    CHECK(dim_of(6, 1.0) == 2);
    CHECK(dim_of(7, 1.0) == 2);
    CHECK(dim_of(8, 1.0) <= 5);
  }

  SUBCASE("parallel point-gradients collapse to one line") {
    // Engineer s2 so grad p(s2) is a multiple of grad p(s1).
    std::mt19937_64 r2(77);
    for (int tries = 0; tries < 10; ++tries) {
      const Matrix B = oracles::random_spd(6, r2);
      const Vector g = oracles::random_vector(6, r2);
      const Vector s1 = oracles::random_unit(6, r2);
      const Vector Binv_g = B.ldlt().solve(g);
      const Vector u = Binv_g + s1;
      const double a = u.squaredNorm();
      const double b = -2.0 * u.dot(Binv_g);
      const double c = Binv_g.squaredNorm() - 1.0;
      const double disc = b * b - 4.0 * a * c;
      if (disc <= 0.0) continue;
      // lambda = 1 recovers s1; take the other root of ||s2(lambda)|| = 1.
      const double l1 = (-b + std::sqrt(disc)) / (2.0 * a);
      const double l2 = (-b - std::sqrt(disc)) / (2.0 * a);
      const double lam = std::abs(l1 - 1.0) > std::abs(l2 - 1.0) ? l1 : l2;
      if (std::abs(lam) < 1e-8 || std::abs(lam - 1.0) < 1e-8) continue;
      const Vector s2 = (lam - 1.0) * Binv_g + lam * s1;
      REQUIRE(std::abs(s2.norm() - 1.0) < 1e-10);
      const auto ts =
          generate_subspace(model_of(g, B, 0.0), make_spec(3, std::make_pair(s1, s2)));
      CHECK(subspace_dimension(ts) == 1);
      return;
    }
    FAIL("no parallel-gradient instance found");
  }
}

TEST_CASE("contains") {
  SUBCASE("sector membership by sign product") {
    Vector r1(2), r2(2);
    r1 << 1.0, 1.0;
    r2 << 1.0, -1.0;
    const TruncatedSubspace ts{Matrix::Identity(2, 2), ShapeSector{r1, r2}, false};
    CHECK(contains(ts, Vector(r1 + r2), 1e-10));
    CHECK(!contains(ts, Vector(r1 - 2.0 * r2), 1e-10));
    CHECK(contains(ts, Vector(Vector::Zero(2)), 1e-10));
    // The set is symmetric through the origin: -(r1 + r2) has a = b = -1.
    CHECK(contains(ts, Vector(-(r1 + r2)), 1e-10));
  }

  SUBCASE("cone contains every unit-ball model gradient direction") {
    std::mt19937_64 rng(13);
    const Matrix B = oracles::random_spd(4, rng);
    const Vector g = oracles::random_vector(4, rng);
    const CubicModel p = model_of(g, B, 0.0);
    const auto ts = generate_subspace(p, make_spec(1, std::nullopt));
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
      Vector s = oracles::random_vector(4, rng);
      if (s.norm() > 1.0) s /= s.norm();
      if (!contains(ts, Vector(grad_model(p, s)), 1e-8)) ++failures;
    }
    CHECK(failures == 0);
  }

  SUBCASE("ray union accepts only the two lines") {
    const TruncatedSubspace ts{Matrix::Identity(2, 2),
                               ShapeRayUnion{Vector::Unit(2, 0), Vector::Unit(2, 1)}, false};
    CHECK(contains(ts, Vector(3.0 * Vector::Unit(2, 0)), 1e-8));
    CHECK(contains(ts, Vector(-2.0 * Vector::Unit(2, 1)), 1e-8));
    Vector mixed(2);
    mixed << 1.0, 1.0;
    CHECK(!contains(ts, mixed, 1e-8));
  }

  SUBCASE("full and punctured shapes accept everything (closure semantics)") {
    const TruncatedSubspace full{Matrix::Identity(3, 3), ShapeFull{}, false};
    const TruncatedSubspace punct{Matrix::Identity(2, 2),
                                  ShapePuncturedPlane{Vector::Unit(2, 1)}, false};
    std::mt19937_64 rng(1);
    CHECK(contains(full, oracles::random_vector(3, rng), 0.0));
    CHECK(contains(punct, oracles::random_vector(2, rng), 0.0));
  }
}

TEST_CASE("boundary_clip") {
  Vector r1(2), r2(2);
  r1 << 1.0, 1.0;
  r2 << 1.0, -1.0;
  const TruncatedSubspace sector{Matrix::Identity(2, 2), ShapeSector{r1, r2}, false};

  SUBCASE("projects onto the nearer bounding line") {
    Vector y_out(2);
    y_out << 0.0, 2.0;
    const Vector clip = boundary_clip(sector, Vector::Zero(2), y_out);
    CHECK((clip - r1).norm() < 1e-12);
    CHECK(contains(sector, clip, 1e-8));

    // Verify against a dense search over the sector.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(0.0, 3.0);
    const double best = (y_out - clip).norm();
    int violations = 0;
    for (int i = 0; i < 200000; ++i) {
      const double a = coef(rng), b = coef(rng);
      for (double sgn : {1.0, -1.0}) {
        const Vector cand = sgn * (a * r1 + b * r2);
        if ((y_out - cand).norm() < best - 1e-9) ++violations;
      }
    }
    CHECK(violations == 0);
  }

  SUBCASE("the apex example point is already inside the two-sided sector") {
    // (-1, 0) = -1/2 r1 - 1/2 r2 has a*b = 1/4 >= 0: contained, no clip.
    Vector y(2);
    y << -1.0, 0.0;
    CHECK(contains(sector, y, 1e-10));
    CHECK((boundary_clip(sector, Vector::Zero(2), y) - y).norm() == 0.0);
  }

  SUBCASE("ray union picks the nearer line") {
    const TruncatedSubspace rays{Matrix::Identity(2, 2),
                                 ShapeRayUnion{Vector::Unit(2, 0), Vector::Unit(2, 1)}, false};
    Vector y_out(2);
    y_out << 3.0, 1.0;
    Vector expected(2);
    expected << 3.0, 0.0;
    CHECK((boundary_clip(rays, Vector::Zero(2), y_out) - expected).norm() < 1e-14);
  }

  SUBCASE("cone clip rotates onto the boundary, preserving the norm") {
    Vector c(3);
    c << 2.0, 0.0, 0.0;
    const TruncatedSubspace cone{Matrix::Identity(3, 3), ShapeCone{c, 1.0}, false};
    Vector y_out(3);
    y_out << 0.1, 3.0, 0.0;
    REQUIRE(!contains(cone, y_out, 1e-10));
    const Vector clip = boundary_clip(cone, Vector::Zero(3), y_out);
    CHECK(clip.norm() == doctest::Approx(y_out.norm()));
    CHECK(contains(cone, clip, 1e-8));
    // On the boundary: distance from center to span{clip} equals the radius.
    const Vector u = clip / clip.norm();
    CHECK((c - c.dot(u) * u).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("build_projection and project_point") {
  SUBCASE("projection table instance: all eight cubic rows") {
    const TableInstance t;
    struct Row {
      int index;
      int q;
      std::vector<double> tau_J;  // expected projection of the all-ones vector
    };
    // P_k = [e1, ..., eq] and tau_k(J) as tabulated.
    const std::vector<Row> rows = {
        {5, 4, {0.0, 1.0, 1.0, 1.0}},   // unit ball, first family
        {6, 1, {0.0}},                  // gradient line, first family
        {7, 2, {0.0, 1.0}},             // two points, first family
        {8, 2, {0.0, 1.0}},             // plane span, first family
        {13, 4, {0.0, 1.0, 1.0, 1.0}},  // unit ball, second family
        {14, 1, {0.0}},                 // gradient line, second family
        {15, 2, {0.0, 1.0}},            // two lines, second family
        {16, 2, {0.0, 1.0}},            // plane span, second family
    };
    for (const auto& row : rows) {
      CAPTURE(row.index);
      const auto ts = generate_subspace(t.model(1.0), t.spec(row.index));
      const auto P = build_projection(ts, t.g);
      REQUIRE(P.q() == row.q);
      for (int j = 0; j < row.q; ++j)
        CHECK((P.columns.col(j) - Vector::Unit(t.n, j)).norm() < 1e-10);
      const Vector tau = project_point(P, t.x_k, t.J);
      for (int j = 0; j < row.q; ++j)
        CHECK(tau(j) == doctest::Approx(row.tau_J[j]).epsilon(1e-10));
    }
  }

  SUBCASE("first column is the normalized gradient") {
    Vector g(2);
    g << 1.0, 1.0;
    const auto ts =
        generate_subspace(model_of(g, diag2(1.0, 2.0), 0.0), make_spec(2, std::nullopt));
    const auto P = build_projection(ts, g);
    CHECK(P.q() == 2);
    CHECK((P.columns.col(0) - g / std::sqrt(2.0)).norm() < 1e-14);
  }

  SUBCASE("two-points family keeps generator order and may have one column") {
    // grad p(s1) = 2 e1, grad p(s2) = 0: a single line survives.
    const Vector g = Vector::Unit(3, 0);
    const Matrix B = Matrix::Identity(3, 3);
    const Vector s1 = Vector::Unit(3, 0);
    const Vector s2 = -Vector::Unit(3, 0);
    const auto ts = generate_subspace(model_of(g, B, 0.0), make_spec(3, {{s1, s2}}));
    const auto P = build_projection(ts, g);
    CHECK(P.q() == 1);
  }

  SUBCASE("projection idempotence inside the subspace") {
    std::mt19937_64 rng(19);
    const Matrix B = oracles::random_spd(7, rng);
    const Vector g = oracles::random_vector(7, rng);
    const auto ts = generate_subspace(model_of(g, B, 0.0), make_spec(2, std::nullopt));
    const auto P = build_projection(ts, g);
    const Vector x_k = oracles::random_vector(7, rng);
    for (int i = 0; i < 100; ++i) {
      const Vector y = oracles::random_vector(P.q(), rng);
      const Vector back = project_point(P, x_k, Vector(x_k + P.columns * y));
      CHECK((back - y).norm() < 1e-10 * std::max(1.0, y.norm()));
    }
  }

  SUBCASE("zero gradient is rejected") {
    const TruncatedSubspace ts{Matrix::Identity(2, 2), ShapeFull{}, false};
    CHECK_THROWS_AS(build_projection(ts, Vector::Zero(2)), std::invalid_argument);
  }
}

TEST_CASE("first-family generator property and second-family span property") {
  std::mt19937_64 rng(101);
  const int n = 12;
  const Matrix B = oracles::random_spd(n, rng);
  const Vector g = oracles::random_vector(n, rng);
  const Vector s1 = oracles::random_unit(n, rng);
  const Vector s2 = oracles::random_unit(n, rng);
  const auto hist = std::make_pair(s1, s2);

  // Sampled generator: grad p(s) over the region; the gradient line uses
  // its parabola parametrization (the sector's own derivation).
  auto sample_generator = [&](const CubicModel& p, RegionKind kind,
                              std::mt19937_64& r) -> Vector {
    std::uniform_real_distribution<double> line(-50.0, 50.0);
    std::uniform_real_distribution<double> plane(-3.0, 3.0);
    switch (kind) {
      case RegionKind::UnitBall: {
        Vector s = oracles::random_vector(n, r);
        if (s.norm() > 1.0) s /= s.norm();
        return grad_model(p, s);
      }
      case RegionKind::GradientLine:
        return gradient_line_generator(p, line(r));
      case RegionKind::TwoPoints:
        return grad_model(p, (r() % 2 == 0) ? s1 : s2);
      case RegionKind::TwoLines:
        return grad_model(p, Vector(line(r) * ((r() % 2 == 0) ? s1 : s2)));
      case RegionKind::PlaneSpan:
        return grad_model(p, Vector(plane(r) * s1 + plane(r) * s2));
    }
    return g;
  };

  SUBCASE("every sampled gradient direction is contained (first family)") {
    for (int idx : {1, 2, 3, 4, 5, 6, 7, 8}) {
      CAPTURE(idx);
      const auto e = subspace_catalogue(idx);
      const CubicModel p = model_of(g, B, e.cubic ? 1.0 : 0.0);
      const auto ts = generate_subspace(p, make_spec(idx, hist));
      int failures = 0;
      for (int i = 0; i < 1000; ++i) {
        const Vector grad = sample_generator(p, e.kind, rng);
        const Vector y = ts.ambient_basis.transpose() * grad;
        // Sampled gradients must also lie in the enclosing span.
        if ((ts.ambient_basis * y - grad).norm() > 1e-8 * std::max(1.0, grad.norm()))
          ++failures;
        if (!contains(ts, y, 1e-8)) ++failures;
      }
      CHECK(failures == 0);
    }
  }

  SUBCASE("sampled gradients span the enclosing subspace (second family)") {
    for (int idx : {9, 10, 11, 12, 13, 14, 15, 16}) {
      CAPTURE(idx);
      const auto e = subspace_catalogue(idx);
      const CubicModel p = model_of(g, B, e.cubic ? 1.0 : 0.0);
      const auto ts = generate_subspace(p, make_spec(idx, hist));
      std::vector<Vector> sampled;
      for (int i = 0; i < 1000; ++i) sampled.push_back(sample_generator(p, e.kind, rng));
      const Matrix Q = gram_schmidt(sampled, 1e-8);
      CHECK(Q.cols() == ts.dim_enclosing());
      int outside = 0;
      for (int j = 0; j < Q.cols(); ++j) {
        const Vector c = Q.col(j);
        if ((ts.ambient_basis * (ts.ambient_basis.transpose() * c) - c).norm() > 1e-8)
          ++outside;
      }
      CHECK(outside == 0);
    }
  }
}

TEST_CASE("coinciding subspaces share enclosing spans") {
  std::mt19937_64 rng(57);
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 9;
    const Matrix B = oracles::random_spd(n, rng);
    const Vector g = oracles::random_vector(n, rng);
    const auto hist =
        std::make_pair(oracles::random_unit(n, rng), oracles::random_unit(n, rng));
    auto sub = [&](int idx) {
      const auto e = subspace_catalogue(idx);
      return generate_subspace(model_of(g, B, e.cubic ? 1.0 : 0.0), make_spec(idx, hist));
    };
    CHECK(same_enclosing_span(sub(11), sub(12)));
    CHECK(same_enclosing_span(sub(15), sub(16)));
    CHECK(same_enclosing_span(sub(9), sub(13)));
    CHECK(sub(9).dim_enclosing() == n);
  }
}

TEST_CASE("rebase_shape preserves membership") {
  std::mt19937_64 rng(91);
  const int n = 6;
  const Matrix B = oracles::random_spd(n, rng);
  const Vector g = oracles::random_vector(n, rng);
  const CubicModel p = model_of(g, B, 1.0);
  const auto ts = generate_subspace(p, make_spec(6, std::nullopt));
  const auto P = build_projection(ts, g);
  const auto shape = rebase_shape(ts, P);
  std::uniform_real_distribution<double> line(-20.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const Vector grad = gradient_line_generator(p, line(rng));
    // Membership must agree whether tested in the original basis or P's.
    const bool in_basis = contains(ts, Vector(ts.ambient_basis.transpose() * grad), 1e-8);
    const bool in_P = shape_contains(shape, Vector(P.columns.transpose() * grad), 1e-8);
    CHECK(in_basis == in_P);
    CHECK(in_basis);
  }
}
