#include "mdlambo/driver.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace mdlambo;

namespace {

Objective quadratic_objective(const Matrix& A) {
  return Objective(
      static_cast<int>(A.rows()), [A](const Vector& x) { return 0.5 * x.dot(A * x); },
      [A](const Vector& x) { return Vector(A * x); }, [A](const Vector&) { return A; });
}

Objective rosenbrock2() {
  return Objective(
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
}

Objective quartic1d() {
  return Objective(
      1, [](const Vector& x) { return std::pow(x(0), 4); },
      [](const Vector& x) { return Vector(Vector::Constant(1, 4.0 * std::pow(x(0), 3))); },
      [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, 12.0 * x(0) * x(0))); });
}

}  // namespace

TEST_CASE("history_directions") {
  SUBCASE("absent with fewer than two distinct predecessors") {
    CHECK(!history_directions({Vector::Zero(2)}));
    CHECK(!history_directions({Vector::Zero(2), Vector::Ones(2)}));
  }
  SUBCASE("normalized differences toward the two most recent predecessors") {
    Vector a(2), b(2), c(2);
    a << 0.0, 0.0;
    b << 1.0, 0.0;
    c << 1.0, 1.0;
    const auto h = history_directions({a, b, c});
    REQUIRE(h.has_value());
    Vector s1(2), s2(2);
    s1 << -1.0, -1.0;
    s1 /= std::sqrt(2.0);
    s2 << 0.0, -1.0;
    CHECK((h->first - s1).norm() < 1e-14);
    CHECK((h->second - s2).norm() < 1e-14);
  }
  SUBCASE("repeated points are skipped") {
    Vector a(2), b(2);
    a << 0.0, 0.0;
    b << 1.0, 0.0;
    const auto h = history_directions({a, b, b});
    // Only one distinct predecessor of the last point.
    CHECK(!h.has_value());
  }
}

TEST_CASE("update_state") {
  DriverConfig cfg;
  SUBCASE("very successful doubles the radius") {
    const auto u = update_state(0.9, 1.0, 1.0, cfg);
    CHECK(u.accept);
    CHECK(u.delta_next == doctest::Approx(2.0));
    CHECK(u.sigma_next == doctest::Approx(0.5));
  }
  SUBCASE("plain success keeps both") {
    const auto u = update_state(0.5, 1.0, 1.0, cfg);
    CHECK(u.accept);
    CHECK(u.delta_next == 1.0);
    CHECK(u.sigma_next == 1.0);
  }
  SUBCASE("failure halves the radius and inflates the regularization") {
    const auto u = update_state(0.05, 1.0, 1.0, cfg);
    CHECK(!u.accept);
    CHECK(u.delta_next == doctest::Approx(0.5));
    CHECK(u.sigma_next == doctest::Approx(2.0));
  }
  SUBCASE("k consecutive rejections give a geometric radius") {
    double delta = 1.0, sigma = 1.0;
    for (int k = 0; k < 10; ++k) {
      const auto u = update_state(-1.0, delta, sigma, cfg);
      delta = u.delta_next;
      sigma = u.sigma_next;
    }
    CHECK(delta == doctest::Approx(std::pow(cfg.gamma_dec, 10)));
  }
  SUBCASE("caps bind") {
    const auto hi = update_state(0.9, 0.9e6, 1.0, cfg);
    CHECK(hi.delta_next == doctest::Approx(1e6));
    const auto lo = update_state(0.9, 1.0, 1.5e-8, cfg);
    CHECK(lo.sigma_next == doctest::Approx(1e-8));
  }
}

TEST_CASE("compute_rho") {
  SUBCASE("exact model gives rho = 1") {
    Matrix A(2, 2);
    A << 2.0, 0.0, 0.0, 4.0;
    const Objective f = quadratic_objective(A);
    Vector x(2);
    x << 1.0, 1.0;
    const ProjectionMatrix P{Matrix::Identity(2, 2)};
    CubicModel m{f.value(x), f.gradient(x), A, 0.0};
    Vector y(2);
    y << -0.5, -0.25;
    const auto out = compute_rho(f, x, f.value(x), P, y, m);
    CHECK(!out.degenerate);
    CHECK(out.rho == doctest::Approx(1.0));
  }
  SUBCASE("quartic hand value") {
    // f(x) = x^4 at x = 1, quadratic model 1 + 4s + 6s^2, full Newton
    // step s = -1/3: predicted 2/3, actual 1 - (2/3)^4 = 65/81.
    const Objective f = quartic1d();
    const ProjectionMatrix P{Matrix::Identity(1, 1)};
    CubicModel m{1.0, Vector::Constant(1, 4.0), Matrix::Constant(1, 1, 12.0), 0.0};
    const Vector y = Vector::Constant(1, -1.0 / 3.0);
    const auto out = compute_rho(f, Vector::Ones(1), 1.0, P, y, m);
    CHECK(out.rho == doctest::Approx((65.0 / 81.0) / (2.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("zero model decrease signals rejection") {
    const Objective f = quartic1d();
    const ProjectionMatrix P{Matrix::Identity(1, 1)};
    CubicModel m{1.0, Vector::Constant(1, 4.0), Matrix::Constant(1, 1, 12.0), 0.0};
    const auto out = compute_rho(f, Vector::Ones(1), 1.0, P, Vector::Zero(1), m);
    CHECK(out.degenerate);
    CHECK(out.rho == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("run on the squared norm converges in a handful of iterations") {
  // The model is exact, so the radius admits the Newton point after a
  // couple of very successful doublings.
  std::mt19937_64 rng(3);
  const Objective f = quadratic_objective(Matrix(2.0 * Matrix::Identity(6, 6)));
  const Vector x0 = 3.0 * oracles::random_unit(6, rng);
  for (int idx : {1, 2, 5, 6, 9, 10, 13, 14}) {  // subspaces containing the gradient
    CAPTURE(idx);
    DriverConfig cfg;
    cfg.subspace_index = idx;
    const auto res = run(f, x0, cfg);
    CHECK(res.termination == Termination::GradTol);
    CHECK(static_cast<int>(res.iterations.size()) <= 5);
    CHECK(f.gradient(res.best_x).norm() <= cfg.grad_tol);
  }
}

TEST_CASE("run on a generic dense quadratic still converges fast") {
  std::mt19937_64 rng(3);
  const Objective f = quadratic_objective(oracles::random_spd(6, rng, 1.0));
  const Vector x0 = oracles::random_vector(6, rng);
  for (int idx : {1, 2, 5, 6, 9, 10, 13, 14}) {
    CAPTURE(idx);
    DriverConfig cfg;
    cfg.subspace_index = idx;
    const auto res = run(f, x0, cfg);
    CHECK(res.termination == Termination::GradTol);
    CHECK(static_cast<int>(res.iterations.size()) <= 25);
  }
}

TEST_CASE("run terminates immediately at a minimizer") {
  Matrix A = 2.0 * Matrix::Identity(3, 3);
  const Objective f = quadratic_objective(A);
  DriverConfig cfg;
  cfg.subspace_index = 9;
  const auto res = run(f, Vector::Zero(3), cfg);
  CHECK(res.termination == Termination::GradTol);
  CHECK(res.iterations.empty());
  CHECK(res.best_f == doctest::Approx(0.0));
}

TEST_CASE("run solves 2-D Rosenbrock with the cubic gradient-line subspace") {
  DriverConfig cfg;
  cfg.subspace_index = 6;
  Vector x0(2);
  x0 << -1.2, 1.0;
  const auto res = run(rosenbrock2(), x0, cfg);
  CHECK(res.termination == Termination::GradTol);
  CHECK(static_cast<int>(res.iterations.size()) < cfg.max_iter);
  CHECK((res.best_x - Vector::Ones(2)).norm() < 1e-4);
}

TEST_CASE("trace invariants") {
  DriverConfig cfg;
  cfg.subspace_index = 6;
  Vector x0(2);
  x0 << -1.2, 1.0;
  const Objective f = rosenbrock2();
  const auto res = run(f, x0, cfg);

  SUBCASE("acceptance matches the rho threshold") {
    for (const auto& rec : res.iterations) CHECK(rec.accepted == (rec.rho >= cfg.eta1));
  }
  SUBCASE("f series tracks the records and never increases on accepts") {
    double last_f = res.f_series.front();
    for (size_t k = 0; k < res.iterations.size(); ++k) {
      const auto& rec = res.iterations[k];
      CHECK(rec.f == doctest::Approx(last_f));
      if (rec.accepted)
        CHECK(res.f_series[k + 1] <= res.f_series[k] + 1e-15);
      else
        CHECK(res.f_series[k + 1] == doctest::Approx(res.f_series[k]));
      last_f = res.f_series[k + 1];
    }
  }
  SUBCASE("rejection streaks stay below the geometric bound") {
    int streak = 0, longest = 0;
    for (const auto& rec : res.iterations) {
      streak = rec.accepted ? 0 : streak + 1;
      longest = std::max(longest, streak);
    }
    CHECK(longest <= 60);
  }
  SUBCASE("radius history follows the three-branch update") {
    for (size_t k = 0; k + 1 < res.iterations.size(); ++k) {
      const auto& a = res.iterations[k];
      const auto& b = res.iterations[k + 1];
      if (a.rho >= cfg.eta2)
        CHECK(b.delta == doctest::Approx(std::min(cfg.gamma_inc * a.delta, cfg.delta_max)));
      else if (a.rho >= cfg.eta1)
        CHECK(b.delta == doctest::Approx(a.delta));
      else
        CHECK(b.delta == doctest::Approx(cfg.gamma_dec * a.delta));
    }
  }
}

TEST_CASE("history fallback is recorded and vanishes once history exists") {
  std::mt19937_64 rng(5);
  const Matrix A = oracles::random_spd(4, rng);
  const Objective f = quadratic_objective(A);
  DriverConfig cfg;
  cfg.subspace_index = 16;  // needs s1, s2
  cfg.grad_tol = 1e-10;
  const auto res = run(f, oracles::random_vector(4, rng), cfg);
  REQUIRE(res.iterations.size() >= 3);
  CHECK(res.iterations[0].fallback);
  bool saw_real = false;
  for (const auto& rec : res.iterations)
    if (!rec.fallback) saw_real = true;
  CHECK(saw_real);
}

TEST_CASE("objective failures carry the partial trace") {
  auto counter = std::make_shared<int>(3);
  Objective f(
      2,
      [counter](const Vector& x) {
        if (--(*counter) <= 0) throw std::runtime_error("synthetic failure");
        return x.squaredNorm();
      },
      [](const Vector& x) { return Vector(2.0 * x); },
      [](const Vector&) { return Matrix(2.0 * Matrix::Identity(2, 2)); });
  DriverConfig cfg;
  cfg.subspace_index = 10;
  cfg.grad_tol = 1e-14;
  try {
    run(f, Vector::Ones(2), cfg);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(std::string(e.what()).find("synthetic failure") != std::string::npos);
    CHECK(!e.partial_result.f_series.empty());
  }
}

TEST_CASE("config validation") {
  DriverConfig cfg;
  cfg.eta1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DriverConfig{};
  cfg.subspace_index = 17;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = DriverConfig{};
  cfg.gamma_dec = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
