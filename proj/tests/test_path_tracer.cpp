#include "eqtrace/builtin_examples.hpp"
#include "eqtrace/path_tracer.hpp"
#include "eqtrace/reference_oracles.hpp"
#include "test_helpers.hpp"

#include <Eigen/SVD>
#include <catch_amalgamated.hpp>

using namespace eqtrace;
using eqtrace::testing::max_abs;
using eqtrace::testing::uniform_matrix;
using eqtrace::testing::uniform_vector;
using Catch::Matchers::WithinAbs;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

NcpProblem affine(const Matrix& M, const Vector& q) {
  return LcpInstance{M, q}.as_ncp();
}

NcpProblem shift(double c) {
  return affine(Matrix::Identity(1, 1), vec({-c}));
}

}  // namespace

TEST_CASE("tangent trivial kernels and orientation") {
  Matrix J1(2, 3);
  J1 << 1, 0, 0, 0, 1, 0;
  CHECK(max_abs(tangent(J1) - vec({0, 0, -1})) < 1e-15);

  Matrix J2(2, 3);
  J2 << 0, 1, 0, 0, 0, 1;
  CHECK(max_abs(tangent(J2, vec({1, 0, 0})) - vec({1, 0, 0})) < 1e-15);
  CHECK(max_abs(tangent(J2, vec({-1, 0, 0})) - vec({-1, 0, 0})) < 1e-15);
}

TEST_CASE("tangent spans the SVD null space of random full-rank matrices") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix J = uniform_matrix(rng, 4, 5, -1, 1);
    const Vector t = tangent(J);
    Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
    const Vector v = svd.matrixV().col(4);
    CHECK(max_abs(J * t) <= 1e-10);
    CHECK_THAT(t.norm(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::abs(t.dot(v)), WithinAbs(1.0, 1e-10));
    CHECK(t[4] < 0.0);
  }
}

TEST_CASE("tangent rejects rank-deficient matrices") {
  Matrix J(2, 3);
  J << 1, 2, 3, 2, 4, 6;
  CHECK_THROWS_AS(tangent(J), SingularMatrixError);
}

TEST_CASE("least_norm_solve small cases") {
  Matrix A1(1, 2);
  A1 << 1, 0;
  CHECK(max_abs(least_norm_solve(A1, vec({3})) - vec({3, 0})) < 1e-15);
  Matrix A2(1, 2);
  A2 << 1, 1;
  CHECK(max_abs(least_norm_solve(A2, vec({2})) - vec({1, 1})) < 1e-15);
  Matrix A3(2, 3);
  A3 << 1, 1, 1, 2, 2, 2;
  CHECK_THROWS_AS(least_norm_solve(A3, vec({1, 2})), SingularMatrixError);
}

TEST_CASE("least_norm_solve matches the normal equations") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = uniform_matrix(rng, 3, 5, -1, 1);
    const Vector b = uniform_vector(rng, 3, -1, 1);
    const Vector normal = A.transpose() * (A * A.transpose()).ldlt().solve(b);
    CHECK(max_abs(least_norm_solve(A, b) - normal) <= 1e-8 * std::max(1.0, max_abs(normal)));
  }
}

TEST_CASE("Moore-Penrose identity A (A+ b) = b on 100 random matrices") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> rows(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rows(rng);
    const int k = m + 1 + trial % 3;
    const Matrix A = uniform_matrix(rng, m, k, -1, 1);
    const Vector b = uniform_vector(rng, m, -1, 1);
    const Vector z = least_norm_solve(A, b);
    CHECK(max_abs(A * z - b) <= 1e-8 * std::max(1.0, max_abs(b)));
  }
}

TEST_CASE("predictor arithmetic") {
  const HomotopyPoint u{vec({1}), vec({1}), 1.0};
  const auto p = predictor(u, vec({0, 0, -1}), 0.3);
  CHECK(p.lambda == Catch::Approx(0.7));
  CHECK(p.x[0] == 1.0);
  const auto same = predictor(u, vec({0.6, 0, -0.8}), 0.0);
  CHECK(max_abs(same.packed() - u.packed()) == 0.0);
  const auto q = predictor(HomotopyPoint{vec({1}), vec({2}), 0.5}, vec({0.6, 0, -0.8}), 0.1);
  CHECK_THAT(q.x[0], WithinAbs(1.06, 1e-15));
  CHECK_THAT(q.y[0], WithinAbs(2.0, 1e-15));
  CHECK_THAT(q.lambda, WithinAbs(0.42, 1e-15));
}

TEST_CASE("corrector") {
  const auto problem = shift(2.0);
  const auto start = HomotopyPoint::start(vec({1}), vec({1}));
  TraceConfig cfg;

  const auto at_start = corrector(problem, start, start, cfg);
  CHECK(at_start.ok());
  CHECK(at_start.steps == 0);

  const Vector t = tangent(jac_H(problem, start, start));
  const auto v = predictor(start, t, 0.3);
  const auto corrected = corrector(problem, v, start, cfg);
  REQUIRE(corrected.ok());
  CHECK(corrected.steps <= 5);
  CHECK(max_abs(eval_H(problem, corrected.point, start)) <= 1e-5);

  // Dense Newton oracle: hold lambda at the corrected value and solve the
  // square 2x2 system in (x, y); the corrector's point must lie on it.
  const double lam = corrected.point.lambda;
  const Evaluator sys = [&](const Vector& z) {
    return eval_H(problem, HomotopyPoint{z.head(1), z.tail(1), lam}, start);
  };
  const JacobianEvaluator jac = [&](const Vector& z) {
    return Matrix(jac_H(problem, HomotopyPoint{z.head(1), z.tail(1), lam}, start).leftCols(2));
  };
  const auto oracle = newton_square_solve(sys, jac, v.packed().head(2));
  CHECK(max_abs(oracle.x - corrected.point.packed().head(2)) <= 1e-5);

  const HomotopyPoint wild{vec({-0.1}), vec({1}), 0.7};
  CHECK(corrector(problem, wild, start, cfg).failure == CorrectorFailure::positivity);
}

TEST_CASE("adapt_steplength rule") {
  TraceConfig cfg;
  CHECK(adapt_steplength(0.3, 1, false, cfg) == 0.5);
  CHECK(adapt_steplength(0.3, 0, true, cfg) == 0.15);
  CHECK(adapt_steplength(0.3, 3, false, cfg) == 0.3);
  CHECK(adapt_steplength(0.3, 6, false, cfg) == 0.15);
  CHECK(adapt_steplength(1e-8, 7, false, cfg) == 1e-8);
}

TEST_CASE("TraceConfig validation") {
  TraceConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.h0 = 0.6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TraceConfig{};
  cfg.eps_residual = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("trace on scalar problems") {
  TraceConfig cfg;
  const auto start = HomotopyPoint::start(vec({1}), vec({1}));

  const auto interior = trace(shift(2.0), start, cfg);
  REQUIRE(interior.status == TraceStatus::converged);
  CHECK_THAT(interior.endpoint.x[0], WithinAbs(2.0, 1e-6));
  CHECK_THAT(interior.endpoint.y[0], WithinAbs(0.0, 1e-6));
  CHECK(ncp_residual(shift(2.0), interior.endpoint.x) <= 1e-5);

  const auto boundary = trace(shift(-1.0), start, cfg);
  REQUIRE(boundary.status == TraceStatus::converged);
  CHECK_THAT(boundary.endpoint.x[0], WithinAbs(0.0, 1e-6));
  CHECK_THAT(boundary.endpoint.y[0], WithinAbs(1.0, 1e-6));
}

TEST_CASE("trace on a 2x2 LCP agrees with enumeration") {
  Matrix M(2, 2);
  M << 2, 0, 0, 2;
  const Vector q = vec({-2, 1});
  const auto sols = lcp_enumerate(LcpInstance{M, q});
  REQUIRE(sols.size() == 1);
  const auto r = trace(affine(M, q), HomotopyPoint::start(Vector::Ones(2), Vector::Ones(2)), TraceConfig{});
  REQUIRE(r.status == TraceStatus::converged);
  CHECK(max_abs(r.endpoint.x - sols.front()) <= 1e-6);
  CHECK(max_abs(r.endpoint.y - vec({0, 1})) <= 1e-6);
}

TEST_CASE("path invariants on every builtin") {
  TraceConfig cfg;
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_example(id);
    const auto problem = compile(model);
    const Index n = problem.dimension();
    const auto start = HomotopyPoint::start(Vector::Ones(n), Vector::Ones(n));
    const auto r = trace(problem, start, cfg);
    INFO(id);
    REQUIRE(r.status == TraceStatus::converged);
    REQUIRE(r.path_log.size() == r.tangents.size());
    CHECK(r.endpoint.lambda <= cfg.eps_lambda);
    CHECK(max_abs(eval_H(problem, r.endpoint, start)) <= cfg.eps_residual);
    const Vector x0y0 = start.x.cwiseProduct(start.y);
    for (std::size_t k = 0; k < r.path_log.size(); ++k) {
      const auto& rec = r.path_log[k];
      const auto u = HomotopyPoint::unpack(rec.point);
      CHECK(rec.residual <= cfg.eps_residual);
      CHECK(max_abs(u.x.cwiseProduct(u.y) - rec.lambda * x0y0) <= 10 * cfg.eps_residual);
      CHECK(rec.lambda >= -cfg.eps_lambda);
      CHECK(rec.lambda <= 1.0);
      if (rec.lambda > cfg.eps_lambda) {
        CHECK(u.x.minCoeff() > 0.0);
        CHECK(u.y.minCoeff() > 0.0);
      }
      if (k > 0) CHECK(r.tangents[k - 1].dot(r.tangents[k]) > 0.0);
    }
  }
}

TEST_CASE("trace is deterministic") {
  const auto problem = compile(builtin_example("ex2"));
  const auto start = HomotopyPoint::start(Vector::Ones(10), Vector::Ones(10));
  const auto a = trace(problem, start, TraceConfig{});
  const auto b = trace(problem, start, TraceConfig{});
  REQUIRE(a.path_log.size() == b.path_log.size());
  for (std::size_t k = 0; k < a.path_log.size(); ++k) {
    CHECK((a.path_log[k].point.array() == b.path_log[k].point.array()).all());
    CHECK(a.path_log[k].steplength == b.path_log[k].steplength);
  }
  CHECK((a.endpoint.packed().array() == b.endpoint.packed().array()).all());
}

TEST_CASE("solve_ncp closed form and restart accounting") {
  TraceConfig cfg;
  const auto sol = solve_ncp(shift(2.0), vec({0.3}), vec({1.7}), cfg);
  CHECK_THAT(sol.x[0], WithinAbs(2.0, 1e-6));
  CHECK(sol.restarts_used == 0);

  int calls = 0;
  const NcpProblem broken(1, [&calls](const Vector& x) -> Vector {
    ++calls;
    throw EvaluationError("broken", 0);
    return x;
  });
  try {
    solve_ncp(broken, vec({1}), vec({1}), cfg);
    FAIL("expected NoConvergenceError");
  } catch (const NoConvergenceError& e) {
    CHECK(e.attempts() == cfg.restart_max + 1);
  }
}

TEST_CASE("solve_ncp on Example 1 from (0.5, 0.5)") {
  const auto model = builtin_example("ex1");
  const auto sol = solve_ncp(compile(model), vec({0.5, 0.5}), vec({1, 1}), TraceConfig{});
  const Vector p = normalize_prices(sol.x);
  CHECK(max_abs(p - vec({0.5, 0.5})) <= 1e-3);
}

TEST_CASE("solve_ncp matches enumeration on 50 random monotone LCPs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 4);
  TraceConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dim(rng);
    const Matrix B = uniform_matrix(rng, n, n, -1, 1);
    const LcpInstance inst{B.transpose() * B + Matrix::Identity(n, n), uniform_vector(rng, n, -1, 1)};
    const auto sols = lcp_enumerate(inst);
    REQUIRE(sols.size() == 1);
    const auto sol = solve_ncp(inst.as_ncp(), Vector::Ones(n), Vector::Ones(n), cfg);
    INFO("trial " << trial);
    CHECK(max_abs(sol.x - sols.front()) <= 1e-5);
  }
}
