#include "mdlambo/problems.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mdlambo {

Objective make_objective(const ProblemSpec& p) {
  return Objective(p.n, p.value, p.gradient, p.hessian);
}

Matrix random_orthogonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  // Fix signs so the factorization is unique given the seed.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

namespace {

ProblemSpec dense_quadratic(const std::string& name, int n, double cond,
                            std::uint64_t seed, const Vector& x0) {
  Vector d(n);
  for (int i = 0; i < n; ++i)
    d(i) = std::pow(cond, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  const Matrix Q = random_orthogonal(n, seed);
  Matrix A = Q * d.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose());

  ProblemSpec p;
  p.name = name;
  p.n = n;
  p.value = [A](const Vector& x) { return 0.5 * x.dot(A * x); };
  p.gradient = [A](const Vector& x) { return Vector(A * x); };
  p.hessian = [A](const Vector&) { return A; };
  p.x0 = x0;
  p.f_best = 0.0;
  p.convex = true;
  p.provenance = "analytic: minimum 0 at the origin";
  return p;
}

ProblemSpec rosenbrock(const std::string& name, int n) {
  if (n % 2 != 0) throw std::invalid_argument("rosenbrock: n must be even");
  ProblemSpec p;
  p.name = name;
  p.n = n;
  p.value = [n](const Vector& x) {
    double f = 0.0;
    for (int i = 0; i < n; i += 2) {
      const double a = x(i + 1) - x(i) * x(i);
      const double b = 1.0 - x(i);
      f += 100.0 * a * a + b * b;
    }
    return f;
  };
  p.gradient = [n](const Vector& x) {
    Vector g = Vector::Zero(n);
    for (int i = 0; i < n; i += 2) {
      const double a = x(i + 1) - x(i) * x(i);
      g(i) = -400.0 * a * x(i) - 2.0 * (1.0 - x(i));
      g(i + 1) = 200.0 * a;
    }
    return g;
  };
  p.hessian = [n](const Vector& x) {
    Matrix H = Matrix::Zero(n, n);
    for (int i = 0; i < n; i += 2) {
      H(i, i) = -400.0 * (x(i + 1) - 3.0 * x(i) * x(i)) + 2.0;
      H(i, i + 1) = H(i + 1, i) = -400.0 * x(i);
      H(i + 1, i + 1) = 200.0;
    }
    return H;
  };
  p.x0.resize(n);
  for (int i = 0; i < n; i += 2) {
    p.x0(i) = -1.2;
    p.x0(i + 1) = 1.0;
  }
  p.f_best = 0.0;
  p.convex = false;
  p.provenance = "analytic: minimum 0 at the all-ones point";
  for (int i = 0; i < n; i += 2) {
    p.residuals.push_back(
        {[i](const Vector& x) {
           const double r = 10.0 * (x(i + 1) - x(i) * x(i));
           return r * r;
         },
         [i, n](const Vector& x) {
           Vector g = Vector::Zero(n);
           const double a = x(i + 1) - x(i) * x(i);
           g(i) = -400.0 * a * x(i);
           g(i + 1) = 200.0 * a;
           return g;
         }});
    p.residuals.push_back(
        {[i](const Vector& x) {
           const double r = 1.0 - x(i);
           return r * r;
         },
         [i, n](const Vector& x) {
           Vector g = Vector::Zero(n);
           g(i) = -2.0 * (1.0 - x(i));
           return g;
         }});
  }
  return p;
}

ProblemSpec powell_singular() {
  ProblemSpec p;
  p.name = "powell_singular4";
  p.n = 4;
  p.value = [](const Vector& x) {
    const double r1 = x(0) + 10.0 * x(1);
    const double r2 = std::sqrt(5.0) * (x(2) - x(3));
    const double r3 = (x(1) - 2.0 * x(2)) * (x(1) - 2.0 * x(2));
    const double r4 = std::sqrt(10.0) * (x(0) - x(3)) * (x(0) - x(3));
    return r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4;
  };
  p.gradient = [](const Vector& x) {
    Vector g(4);
    const double r1 = x(0) + 10.0 * x(1);
    const double d23 = x(2) - x(3);
    const double d12 = x(1) - 2.0 * x(2);
    const double d03 = x(0) - x(3);
    g(0) = 2.0 * r1 + 40.0 * d03 * d03 * d03;
    g(1) = 20.0 * r1 + 4.0 * d12 * d12 * d12;
    g(2) = 10.0 * d23 - 8.0 * d12 * d12 * d12;
    g(3) = -10.0 * d23 - 40.0 * d03 * d03 * d03;
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix H = Matrix::Zero(4, 4);
    const double d12sq = (x(1) - 2.0 * x(2)) * (x(1) - 2.0 * x(2));
    const double d03sq = (x(0) - x(3)) * (x(0) - x(3));
    H(0, 0) = 2.0 + 120.0 * d03sq;
    H(0, 1) = H(1, 0) = 20.0;
    H(0, 3) = H(3, 0) = -120.0 * d03sq;
    H(1, 1) = 200.0 + 12.0 * d12sq;
    H(1, 2) = H(2, 1) = -24.0 * d12sq;
    H(2, 2) = 10.0 + 48.0 * d12sq;
    H(2, 3) = H(3, 2) = -10.0;
    H(3, 3) = 10.0 + 120.0 * d03sq;
    return H;
  };
  p.x0.resize(4);
  p.x0 << 3.0, -1.0, 0.0, 1.0;
  p.f_best = 0.0;
  p.convex = false;
  p.provenance = "analytic: minimum 0 at the origin (singular there)";
  const auto rb = [](auto val, auto grad) {
    return ResidualBlock{std::move(val), std::move(grad)};
  };
  p.residuals.push_back(rb(
      [](const Vector& x) {
        const double r = x(0) + 10.0 * x(1);
        return r * r;
      },
      [](const Vector& x) {
        Vector g = Vector::Zero(4);
        const double r = x(0) + 10.0 * x(1);
        g(0) = 2.0 * r;
        g(1) = 20.0 * r;
        return g;
      }));
  p.residuals.push_back(rb(
      [](const Vector& x) {
        const double d = x(2) - x(3);
        return 5.0 * d * d;
      },
      [](const Vector& x) {
        Vector g = Vector::Zero(4);
        const double d = x(2) - x(3);
        g(2) = 10.0 * d;
        g(3) = -10.0 * d;
        return g;
      }));
  p.residuals.push_back(rb(
      [](const Vector& x) {
        const double d = x(1) - 2.0 * x(2);
        return d * d * d * d;
      },
      [](const Vector& x) {
        Vector g = Vector::Zero(4);
        const double d3 = std::pow(x(1) - 2.0 * x(2), 3);
        g(1) = 4.0 * d3;
        g(2) = -8.0 * d3;
        return g;
      }));
  p.residuals.push_back(rb(
      [](const Vector& x) {
        const double d = x(0) - x(3);
        return 10.0 * d * d * d * d;
      },
      [](const Vector& x) {
        Vector g = Vector::Zero(4);
        const double d3 = std::pow(x(0) - x(3), 3);
        g(0) = 40.0 * d3;
        g(3) = -40.0 * d3;
        return g;
      }));
  return p;
}

ProblemSpec trigonometric(int n) {
  // Residuals r_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i.
  auto residual = [n](const Vector& x, int i) {
    double sum_cos = 0.0;
    for (int j = 0; j < n; ++j) sum_cos += std::cos(x(j));
    return n - sum_cos + (i + 1) * (1.0 - std::cos(x(i))) - std::sin(x(i));
  };
  auto residual_grad = [n](const Vector& x, int i) {
    Vector g(n);
    for (int j = 0; j < n; ++j) g(j) = std::sin(x(j));
    g(i) += (i + 1) * std::sin(x(i)) - std::cos(x(i));
    return g;
  };
  ProblemSpec p;
  p.name = "trigonometric" + std::to_string(n);
  p.n = n;
  p.value = [n, residual](const Vector& x) {
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = residual(x, i);
      f += r * r;
    }
    return f;
  };
  p.gradient = [n, residual, residual_grad](const Vector& x) {
    Vector g = Vector::Zero(n);
    for (int i = 0; i < n; ++i) g += 2.0 * residual(x, i) * residual_grad(x, i);
    return g;
  };
  p.hessian = [n, residual, residual_grad](const Vector& x) {
    Matrix H = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double r = residual(x, i);
      const Vector gr = residual_grad(x, i);
      H += 2.0 * gr * gr.transpose();
      // Second-derivative term of r_i: diag(cos x_j) with extras on (i, i).
      for (int j = 0; j < n; ++j) H(j, j) += 2.0 * r * std::cos(x(j));
      H(i, i) += 2.0 * r * ((i + 1) * std::cos(x(i)) + std::sin(x(i)));
    }
    return H;
  };
  p.x0 = Vector::Constant(n, 1.0 / n);
  p.f_best = 0.0;
  p.convex = false;
  p.provenance = "classical zero-residual system; global minimum 0";
  for (int i = 0; i < n; ++i)
    p.residuals.push_back({[residual, i](const Vector& x) {
                             const double r = residual(x, i);
                             return r * r;
                           },
                           [residual, residual_grad, i](const Vector& x) {
                             return Vector(2.0 * residual(x, i) * residual_grad(x, i));
                           }});
  return p;
}

ProblemSpec beale() {
  const double c1 = 1.5, c2 = 2.25, c3 = 2.625;
  auto rs = [c1, c2, c3](const Vector& x) {
    return Vector{{c1 - x(0) * (1.0 - x(1)), c2 - x(0) * (1.0 - x(1) * x(1)),
                   c3 - x(0) * (1.0 - x(1) * x(1) * x(1))}};
  };
  ProblemSpec p;
  p.name = "beale2";
  p.n = 2;
  p.value = [rs](const Vector& x) { return rs(x).squaredNorm(); };
  p.gradient = [rs](const Vector& x) {
    const Vector r = rs(x);
    Vector g = Vector::Zero(2);
    for (int i = 0; i < 3; ++i) {
      const double yi = std::pow(x(1), i + 1);
      const double dr_dx0 = -(1.0 - yi);
      const double dr_dx1 = x(0) * (i + 1) * std::pow(x(1), i);
      g(0) += 2.0 * r(i) * dr_dx0;
      g(1) += 2.0 * r(i) * dr_dx1;
    }
    return g;
  };
  p.hessian = [rs](const Vector& x) {
    const Vector r = rs(x);
    Matrix H = Matrix::Zero(2, 2);
    for (int i = 0; i < 3; ++i) {
      const int k = i + 1;
      const double yk = std::pow(x(1), k);
      const double dr_dx0 = -(1.0 - yk);
      const double dr_dx1 = x(0) * k * std::pow(x(1), k - 1);
      Vector gr(2);
      gr << dr_dx0, dr_dx1;
      H += 2.0 * gr * gr.transpose();
      // Cross second derivatives of r_i.
      const double d2_01 = k * std::pow(x(1), k - 1);
      const double d2_11 = x(0) * k * (k - 1) * (k >= 2 ? std::pow(x(1), k - 2) : 0.0);
      H(0, 1) += 2.0 * r(i) * d2_01;
      H(1, 0) += 2.0 * r(i) * d2_01;
      H(1, 1) += 2.0 * r(i) * d2_11;
    }
    return H;
  };
  p.x0.resize(2);
  p.x0 << 1.0, 1.0;
  p.f_best = 0.0;
  p.convex = false;
  p.provenance = "analytic: minimum 0 at (3, 0.5)";
  for (int i = 0; i < 3; ++i) {
    p.residuals.push_back({[rs, i](const Vector& x) {
                             const double r = rs(x)(i);
                             return r * r;
                           },
                           [rs, i](const Vector& x) {
                             const double r = rs(x)(i);
                             const int k = i + 1;
                             Vector g(2);
                             g(0) = 2.0 * r * (-(1.0 - std::pow(x(1), k)));
                             g(1) = 2.0 * r * (x(0) * k * std::pow(x(1), k - 1));
                             return g;
                           }});
  }
  return p;
}

ProblemSpec quartic_sum(int n) {
  ProblemSpec p;
  p.name = "quartic_sum" + std::to_string(n);
  p.n = n;
  p.value = [n](const Vector& x) {
    double f = 0.0;
    for (int i = 0; i < n; ++i) f += (i + 1) * std::pow(x(i), 4);
    return f;
  };
  p.gradient = [n](const Vector& x) {
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = 4.0 * (i + 1) * std::pow(x(i), 3);
    return g;
  };
  p.hessian = [n](const Vector& x) {
    Matrix H = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) H(i, i) = 12.0 * (i + 1) * x(i) * x(i);
    return H;
  };
  p.x0 = Vector::Constant(n, 1.0);
  p.f_best = 0.0;
  p.convex = true;
  p.provenance = "analytic: separable even powers, minimum 0 at the origin";
  return p;
}

ProblemSpec logsumexp_sym(int n) {
  // f(x) = log sum_i (e^{x_i} + e^{-x_i}); minimum log(2n) at the origin.
  auto weights = [n](const Vector& x, double& S) {
    Vector wp(n), wm(n);
    S = 0.0;
    for (int i = 0; i < n; ++i) {
      wp(i) = std::exp(x(i));
      wm(i) = std::exp(-x(i));
      S += wp(i) + wm(i);
    }
    return std::make_pair(wp, wm);
  };
  ProblemSpec p;
  p.name = "logsumexp" + std::to_string(n);
  p.n = n;
  p.value = [weights](const Vector& x) {
    double S;
    weights(x, S);
    return std::log(S);
  };
  p.gradient = [n, weights](const Vector& x) {
    double S;
    auto [wp, wm] = weights(x, S);
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = (wp(i) - wm(i)) / S;
    return g;
  };
  p.hessian = [n, weights](const Vector& x) {
    double S;
    auto [wp, wm] = weights(x, S);
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = (wp(i) - wm(i)) / S;
    Matrix H = -g * g.transpose();
    for (int i = 0; i < n; ++i) H(i, i) += (wp(i) + wm(i)) / S;
    return H;
  };
  p.x0 = Vector::LinSpaced(n, -1.0, 2.0);
  p.f_best = std::log(2.0 * n);
  p.convex = true;
  p.provenance = "analytic: symmetric log-sum-exp, minimum log(2n) at the origin";
  return p;
}

ProblemSpec rastrigin(int n) {
  ProblemSpec p;
  p.name = "rastrigin" + std::to_string(n);
  p.n = n;
  const double A = 10.0;
  const double tau = 2.0 * M_PI;
  p.value = [n, A, tau](const Vector& x) {
    double f = A * n;
    for (int i = 0; i < n; ++i) f += x(i) * x(i) - A * std::cos(tau * x(i));
    return f;
  };
  p.gradient = [n, A, tau](const Vector& x) {
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = 2.0 * x(i) + A * tau * std::sin(tau * x(i));
    return g;
  };
  p.hessian = [n, A, tau](const Vector& x) {
    Matrix H = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) H(i, i) = 2.0 + A * tau * tau * std::cos(tau * x(i));
    return H;
  };
  p.x0 = Vector::Constant(n, 0.35);
  if (n >= 2) p.x0(1) = -0.25;
  p.f_best = 0.0;
  p.convex = false;
  p.provenance = "analytic: global minimum 0 at the origin, many local minima";
  return p;
}

}  // namespace

std::vector<ProblemSpec> registry() {
  std::vector<ProblemSpec> out;
  Vector x0_2(2);
  x0_2 << 2.0, 1.0;
  out.push_back(dense_quadratic("quadratic2", 2, 10.0, 11, x0_2));
  out.push_back(dense_quadratic("quadratic10", 10, 10.0, 12, Vector::Constant(10, 2.0)));
  out.push_back(dense_quadratic("quadratic_ill10", 10, 1e4, 13, Vector::Constant(10, 2.0)));
  out.push_back(dense_quadratic("quadratic50", 50, 1e2, 14, Vector::Constant(50, 1.0)));
  out.push_back(dense_quadratic("quadratic100", 100, 1e2, 15, Vector::Constant(100, 1.0)));
  out.push_back(rosenbrock("rosenbrock2", 2));
  out.push_back(rosenbrock("rosenbrock50", 50));
  out.push_back(powell_singular());
  out.push_back(trigonometric(10));
  out.push_back(beale());
  out.push_back(quartic_sum(10));
  out.push_back(logsumexp_sym(10));
  out.push_back(rastrigin(2));
  return out;
}

bool glob_match(const std::string& pattern, const std::string& text) {
  // Iterative wildcard match supporting '*' and '?'.
  size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<ProblemSpec> select_problems(const std::string& glob) {
  std::vector<ProblemSpec> out;
  for (auto& p : registry())
    if (glob_match(glob, p.name)) out.push_back(std::move(p));
  return out;
}

std::string VariantTransform::label() const {
  switch (kind) {
    case Kind::DiagonalScaling: return "scale";
    case Kind::OrthogonalRotation: return "rotate" + std::to_string(seed);
    case Kind::Shift: return "shift";
    case Kind::AffineCombination: return "affine";
  }
  return "?";
}

ProblemSpec apply_variant(const ProblemSpec& p, const VariantTransform& v) {
  ProblemSpec out = p;
  out.variant = p.variant == "base" ? v.label() : p.variant + "+" + v.label();

  using Kind = VariantTransform::Kind;
  if (v.kind == Kind::AffineCombination) {
    if (v.scale <= 0.0)
      throw std::invalid_argument("apply_variant: affine scale must be positive");
    const double a = v.scale, b = v.offset;
    auto val = p.value;
    auto grad = p.gradient;
    auto hess = p.hessian;
    out.value = [val, a, b](const Vector& x) { return a * val(x) + b; };
    out.gradient = [grad, a](const Vector& x) { return Vector(a * grad(x)); };
    out.hessian = [hess, a](const Vector& x) { return Matrix(a * hess(x)); };
    out.f_best = a * p.f_best + b;
    out.residuals.clear();
    for (const auto& r : p.residuals) {
      auto rv = r.value;
      auto rg = r.gradient;
      out.residuals.push_back(
          {[rv, a](const Vector& x) { return a * rv(x); },
           [rg, a](const Vector& x) { return Vector(a * rg(x)); }});
    }
    return out;
  }

  // Coordinate substitutions y -> map(y), objective g(y) = f(map(y)).
  std::function<Vector(const Vector&)> fwd;   // map into the original space
  std::function<Vector(const Vector&)> back;  // original point -> new x0
  Matrix J;                                   // constant Jacobian of fwd
  if (v.kind == Kind::DiagonalScaling) {
    if (v.factors.size() != p.n)
      throw std::invalid_argument("apply_variant: scaling factors dimension mismatch");
    if ((v.factors.array() == 0.0).any())
      throw std::invalid_argument("apply_variant: singular scaling");
    const Vector d = v.factors;
    fwd = [d](const Vector& y) { return Vector(d.asDiagonal() * y); };
    back = [d](const Vector& x) { return Vector(x.cwiseQuotient(d)); };
    J = Matrix(d.asDiagonal());
  } else if (v.kind == Kind::OrthogonalRotation) {
    const Matrix R = random_orthogonal(p.n, v.seed);
    fwd = [R](const Vector& y) { return Vector(R * y); };
    back = [R](const Vector& x) { return Vector(R.transpose() * x); };
    J = R;
  } else {  // Shift
    if (v.shift.size() != p.n)
      throw std::invalid_argument("apply_variant: shift dimension mismatch");
    const Vector t = v.shift;
    fwd = [t](const Vector& y) { return Vector(y + t); };
    back = [t](const Vector& x) { return Vector(x - t); };
    J = Matrix::Identity(p.n, p.n);
  }

  auto val = p.value;
  auto grad = p.gradient;
  auto hess = p.hessian;
  out.value = [val, fwd](const Vector& y) { return val(fwd(y)); };
  out.gradient = [grad, fwd, J](const Vector& y) { return Vector(J.transpose() * grad(fwd(y))); };
  out.hessian = [hess, fwd, J](const Vector& y) {
    return Matrix(J.transpose() * hess(fwd(y)) * J);
  };
  out.x0 = back(p.x0);
  out.residuals.clear();
  for (const auto& r : p.residuals) {
    auto rv = r.value;
    auto rg = r.gradient;
    out.residuals.push_back(
        {[rv, fwd](const Vector& y) { return rv(fwd(y)); },
         [rg, fwd, J](const Vector& y) { return Vector(J.transpose() * rg(fwd(y))); }});
  }
  return out;
}

std::vector<VariantTransform> default_variants(int count, std::uint64_t seed, int n) {
  std::vector<VariantTransform> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_scale(-0.7, 0.7);  // ~ [0.5, 2]
  std::normal_distribution<double> normal(0.0, 0.5);
  for (int i = 0; i < count; ++i) {
    VariantTransform v;
    switch (i % 4) {
      case 0:
        v.kind = VariantTransform::Kind::OrthogonalRotation;
        v.seed = rng();
        break;
      case 1: {
        v.kind = VariantTransform::Kind::DiagonalScaling;
        v.factors.resize(n);
        for (int j = 0; j < n; ++j) v.factors(j) = std::exp(log_scale(rng));
        break;
      }
      case 2: {
        v.kind = VariantTransform::Kind::Shift;
        v.shift.resize(n);
        for (int j = 0; j < n; ++j) v.shift(j) = normal(rng);
        break;
      }
      default:
        v.kind = VariantTransform::Kind::AffineCombination;
        v.scale = std::exp(log_scale(rng));
        v.offset = normal(rng);
        break;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mdlambo
