#include "mdlambo/model.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace mdlambo;

namespace {
CubicModel make(double c, Vector g, Matrix B, double sigma) {
  return CubicModel{c, std::move(g), std::move(B), sigma};
}
}  // namespace

TEST_CASE("eval_model matches the closed form") {
  const CubicModel pure_quad = make(0.0, Vector::Zero(2), Matrix::Identity(2, 2), 0.0);
  Vector s(2);
  s << 1.0, 0.0;
  CHECK(eval_model(pure_quad, s) == doctest::Approx(0.5));

  const CubicModel pure_cubic = make(0.0, Vector::Zero(2), Matrix::Zero(2, 2), 3.0);
  CHECK(eval_model(pure_cubic, s) == doctest::Approx(1.0));

  Vector g(2);
  g << 1.0, 1.0;
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  const CubicModel m = make(1.0, g, D, 1.0);
  Vector s11(2);
  s11 << 1.0, 1.0;
  // 1 + 2 + 1.5 + (1/3) (sqrt 2)^3
  CHECK(eval_model(m, s11) ==
        doctest::Approx(4.5 + std::pow(std::sqrt(2.0), 3) / 3.0).epsilon(1e-12));
  CHECK(eval_model(m, s11) == doctest::Approx(5.4428).epsilon(1e-4));
}

TEST_CASE("eval_model rejects dimension mismatch") {
  const CubicModel m = make(0.0, Vector::Zero(2), Matrix::Identity(2, 2), 0.0);
  CHECK_THROWS_AS(eval_model(m, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(grad_model(m, Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("grad_model special cases") {
  std::mt19937_64 rng(7);
  SUBCASE("sigma = 0 is the quadratic gradient") {
    const Matrix B = oracles::random_symmetric(3, rng);
    const Vector g = oracles::random_vector(3, rng);
    const Vector s = oracles::random_vector(3, rng);
    const CubicModel m = make(0.0, g, B, 0.0);
    CHECK((grad_model(m, s) - (g + B * s)).norm() < 1e-14);
  }
  SUBCASE("gradient at zero equals the linear term") {
    const CubicModel m = make(2.0, Vector::Ones(4), Matrix::Identity(4, 4), 3.0);
    CHECK((grad_model(m, Vector::Zero(4)) - Vector::Ones(4)).norm() == 0.0);
  }
  SUBCASE("hand value with the cubic term") {
    Vector g(2);
    g << 1.0, 1.0;
    Matrix B = Matrix::Zero(2, 2);
    B(0, 0) = 1.0;
    B(1, 1) = 2.0;
    const CubicModel m = make(0.0, g, B, 1.0);
    Vector s(2);
    s << 1.0, 0.0;
    Vector expected(2);
    expected << 3.0, 1.0;
    CHECK((grad_model(m, s) - expected).norm() < 1e-14);
  }
}

TEST_CASE("grad_model agrees with central differences of eval_model") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> norm_range(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const CubicModel m = make(oracles::random_vector(1, rng)(0),
                              oracles::random_vector(d, rng),
                              oracles::random_symmetric(d, rng),
                              std::abs(oracles::random_vector(1, rng)(0)));
    Vector s = oracles::random_unit(d, rng) * norm_range(rng);
    const Vector fd = oracles::central_diff_gradient(
        [&](const Vector& y) { return eval_model(m, y); }, s, 1e-6 * std::max(1.0, s.norm()));
    const Vector an = grad_model(m, s);
    CHECK((an - fd).norm() <= 1e-6 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("sigma = 0 evaluation equals explicit summation") {
  std::mt19937_64 rng(3);
  for (int d = 1; d <= 4; ++d) {
    const CubicModel m = make(oracles::random_vector(1, rng)(0),
                              oracles::random_vector(d, rng),
                              oracles::random_symmetric(d, rng), 0.0);
    const Vector s = oracles::random_vector(d, rng);
    double ref = m.constant;
    for (int i = 0; i < d; ++i) {
      ref += m.linear(i) * s(i);
      for (int j = 0; j < d; ++j) ref += 0.5 * s(i) * m.quadratic(i, j) * s(j);
    }
    CHECK(eval_model(m, s) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("taylor_model extracts value, gradient and Hessian") {
  SUBCASE("squared norm") {
    Objective f(
        3, [](const Vector& x) { return x.squaredNorm(); },
        [](const Vector& x) { return Vector(2.0 * x); },
        [](const Vector& x) { return Matrix(2.0 * Matrix::Identity(x.size(), x.size())); });
    Vector e1 = Vector::Zero(3);
    e1(0) = 1.0;
    const CubicModel m = taylor_model(f, e1, 0.0);
    CHECK(m.constant == doctest::Approx(1.0));
    CHECK((m.linear - 2.0 * e1).norm() == 0.0);
    CHECK((m.quadratic - 2.0 * Matrix::Identity(3, 3)).norm() == 0.0);
    CHECK(m.cubic_weight == 0.0);
  }
  SUBCASE("quartic in one variable") {
    Objective f(
        1, [](const Vector& x) { return std::pow(x(0), 4); },
        [](const Vector& x) { return Vector(Vector::Constant(1, 4.0 * std::pow(x(0), 3))); },
        [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, 12.0 * x(0) * x(0))); });
    const CubicModel m = taylor_model(f, Vector::Ones(1), 0.0);
    CHECK(m.constant == doctest::Approx(1.0));
    CHECK(m.linear(0) == doctest::Approx(4.0));
    CHECK(m.quadratic(0, 0) == doctest::Approx(12.0));
  }
  SUBCASE("gradient vanishes at a minimizer") {
    // 2-D Rosenbrock at its solution.
    Objective f(
        2,
        [](const Vector& x) {
          const double a = x(1) - x(0) * x(0);
          return 100.0 * a * a + (1.0 - x(0)) * (1.0 - x(0));
        },
        [](const Vector& x) {
          Vector g(2);
          const double a = x(1) - x(0) * x(0);
          g << -400.0 * a * x(0) - 2.0 * (1.0 - x(0)), 200.0 * a;
          return g;
        },
        [](const Vector& x) {
          Matrix H(2, 2);
          H << -400.0 * (x(1) - 3.0 * x(0) * x(0)) + 2.0, -400.0 * x(0), -400.0 * x(0), 200.0;
          return H;
        });
    const CubicModel m = taylor_model(f, Vector::Ones(2), 1.0);
    CHECK(m.linear.norm() == 0.0);
    CHECK(m.cubic_weight == 1.0);
  }
  SUBCASE("derivative-free objective is rejected") {
    Objective f(2, [](const Vector& x) { return x.squaredNorm(); });
    CHECK_THROWS_AS(taylor_model(f, Vector::Zero(2), 0.0), ObjectiveError);
  }
}

TEST_CASE("objective assembles the Hessian from matrix-vector products") {
  Matrix A(2, 2);
  A << 3.0, 1.0, 1.0, 4.0;
  Objective f(
      2, [A](const Vector& x) { return 0.5 * x.dot(A * x); },
      [A](const Vector& x) { return Vector(A * x); }, nullptr,
      [A](const Vector&, const Vector& v) { return Vector(A * v); });
  CHECK(f.has_hessian());
  CHECK((f.hessian(Vector::Zero(2)) - A).norm() < 1e-14);
  CHECK(f.counts().hessian.load() == 1);
}

TEST_CASE("eval counters are monotone and shared across copies") {
  Objective f(2, [](const Vector& x) { return x.sum(); });
  const Objective g = f;
  f.value(Vector::Zero(2));
  g.value(Vector::Zero(2));
  CHECK(f.counts().value.load() == 2);
}
