#include "eqtrace/builtin_examples.hpp"
#include "eqtrace/reference_oracles.hpp"
#include "test_helpers.hpp"

#include <catch_amalgamated.hpp>

using namespace eqtrace;
using eqtrace::testing::max_abs;
using eqtrace::testing::uniform_matrix;
using eqtrace::testing::uniform_vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LcpInstance scalar(double m, double q) { return {Matrix::Constant(1, 1, m), vec({q})}; }

}  // namespace

TEST_CASE("lcp_enumerate small instances") {
  auto a = lcp_enumerate(scalar(1, -1));
  REQUIRE(a.size() == 1);
  CHECK(a[0][0] == 1.0);
  auto b = lcp_enumerate(scalar(1, 2));
  REQUIRE(b.size() == 1);
  CHECK(b[0][0] == 0.0);
  Matrix M(2, 2);
  M << 2, 0, 0, 2;
  auto c = lcp_enumerate({M, vec({-2, 1})});
  REQUIRE(c.size() == 1);
  CHECK(max_abs(c[0] - vec({1, 0})) == 0.0);
}

TEST_CASE("lcp_enumerate finds every solution of a nonmonotone LCP") {
  // M = -1, q = 1: x = 0 (f = 1) and x = 1 (f = 0).
  auto s = lcp_enumerate(scalar(-1, 1));
  REQUIRE(s.size() == 2);
  CHECK(s[0][0] == 0.0);
  CHECK(s[1][0] == 1.0);
}

TEST_CASE("lcp_enumerate skips singular principal submatrices") {
  Matrix M(2, 2);
  M << 0, 0, 0, 1;
  const auto s = lcp_enumerate({M, vec({0, -1})});
  REQUIRE_FALSE(s.empty());
  for (const auto& x : s) CHECK(ncp_residual(LcpInstance{M, vec({0, -1})}.as_ncp(), x) <= 1e-12);
}

TEST_CASE("lcp_enumerate rejects oversized instances") {
  const Index n = kMaxEnumerationSize + 1;
  CHECK_THROWS_AS(lcp_enumerate({Matrix::Identity(n, n), Vector::Ones(n)}), std::invalid_argument);
}

TEST_CASE("enumerated solutions certify and monotone LCPs have exactly one") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 6;
    const Matrix B = uniform_matrix(rng, n, n, -1, 1);
    const LcpInstance spd{B.transpose() * B + Matrix::Identity(n, n), uniform_vector(rng, n, -1, 1)};
    const auto one = lcp_enumerate(spd);
    CHECK(one.size() == 1);
    const LcpInstance general{uniform_matrix(rng, n, n, -1, 1), uniform_vector(rng, n, -1, 1)};
    for (const auto* inst : {&spd, &general}) {
      for (const auto& x : lcp_enumerate(*inst)) {
        CHECK(x.minCoeff() >= 0.0);
        CHECK(ncp_residual(inst->as_ncp(), x) <= 1e-8);
      }
    }
  }
}

TEST_CASE("newton_square_solve affine systems take one undamped step") {
  const auto r = newton_square_solve([](const Vector& x) { Vector f = x.array() - 2.0; return f; },
                                     [](const Vector&) { Matrix J = Matrix::Identity(1, 1); return J; },
                                     vec({5}));
  CHECK(r.x[0] == 2.0);
  CHECK(r.iterations == 1);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix M = uniform_matrix(rng, 4, 4, -1, 1) + 4 * Matrix::Identity(4, 4);
    const Vector q = uniform_vector(rng, 4, -1, 1);
    const auto s = newton_square_solve([&](const Vector& x) { Vector f = M * x + q; return f; },
                                       [&](const Vector&) { return M; }, Vector::Zero(4));
    CHECK(s.iterations == 1);
    CHECK(max_abs(M * s.x + q) <= 1e-10);
  }
}

TEST_CASE("newton_square_solve errors") {
  CHECK_THROWS_AS(newton_square_solve([](const Vector& x) { Vector f = x.array() - 1.0; return f; },
                                      [](const Vector&) { Matrix J = Matrix::Zero(1, 1); return J; },
                                      vec({0})),
                  SingularMatrixError);
  // x^2 + 1 has no real root.
  CHECK_THROWS_AS(
      newton_square_solve([](const Vector& x) { Vector f = x.array().square() + 1.0; return f; },
                          [](const Vector& x) { Matrix J(1, 1); J(0, 0) = 2 * x[0]; return J; },
                          vec({0.5})),
      NoConvergenceError);
}

TEST_CASE("Example 1 normalized square system from (0.45, 0.55)") {
  const auto model = builtin_example("ex1");
  const auto& ex = model.exchange();
  const Evaluator sys = [&ex](const Vector& p) {
    Vector f(2);
    f[0] = excess_demand(ex, p)[0];
    f[1] = p.sum() - 1.0;
    return f;
  };
  const JacobianEvaluator jac = [&ex](const Vector& p) {
    Matrix J(2, 2);
    J.row(0) = excess_demand_jacobian(ex, p).row(0);
    J.row(1).setOnes();
    return J;
  };
  const auto r = newton_square_solve(sys, jac, vec({0.45, 0.55}));
  CHECK(max_abs(r.x - vec({0.5, 0.5})) <= 1e-10);
}

TEST_CASE("Example 4 square system agrees with the homotopy answer") {
  const auto model = builtin_example("ex4");
  const auto& prod = std::get<ProductionEconomy>(model.economy);
  const auto& ex = prod.exchange();
  const Matrix& A = prod.activity_matrix();
  // Unknowns (p1, p2, p3, y). Market clearing for goods 2-3, zero profit,
  // and the simplex row (Walras' law makes good 1 redundant).
  const Evaluator sys = [&](const Vector& z) {
    const Vector p = z.head(3);
    const Vector clear = A * z.tail(1) - excess_demand(ex, p);
    Vector f(4);
    f << clear[1], clear[2], -(A.transpose() * p)[0], p.sum() - 1.0;
    return f;
  };
  const JacobianEvaluator jac = [&](const Vector& z) {
    const Matrix dxi = excess_demand_jacobian(ex, z.head(3));
    Matrix J = Matrix::Zero(4, 4);
    J.block(0, 0, 2, 3) = -dxi.bottomRows(2);
    J.block(0, 3, 2, 1) = A.bottomRows(2);
    J.block(2, 0, 1, 3) = -A.transpose();
    J.block(3, 0, 1, 3).setOnes();
    return J;
  };
  Vector guess(4);
  guess << 0.4, 0.2, 0.4, 2.0;
  const auto newton = newton_square_solve(sys, jac, guess);
  const auto report = compute_equilibrium(model, TraceConfig{});
  CHECK(max_abs(newton.x.head(3) - report.prices) <= 1e-6);
  CHECK(std::abs(newton.x[3] - (*report.activities)[0]) <= 1e-6);
}
