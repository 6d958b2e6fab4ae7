#pragma once

// Nonlinear complementarity problems and the positivity-preserving homotopy
//
//   H(x, y, lambda) = ( X y - lambda X0 y0 ,  y - (1 - lambda) f(x) - lambda y0 )
//
// whose zero set connects the start point (x0, y0) at lambda = 1 to a
// solution of  x >= 0, f(x) >= 0, x'f(x) = 0  at lambda = 0.

#include "eqtrace/types.hpp"

#include <functional>
#include <optional>

namespace eqtrace {

using Evaluator = std::function<Vector(const Vector&)>;
using JacobianEvaluator = std::function<Matrix(const Vector&)>;

// Returns the first coordinate at which the map is undefined, or nullopt.
using DomainGuard = std::function<std::optional<Index>(const Vector&)>;

/// Guard accepting only strictly positive vectors.
std::optional<Index> strictly_positive(const Vector& x);

/// Guard that accepts everything (for maps defined on all of R^n).
std::optional<Index> unrestricted(const Vector& x);

// NCP(f): find x >= 0 with f(x) >= 0 and x'f(x) = 0.
//
// Immutable after construction; copies share the underlying callables, which
// must themselves be free of mutable shared state.
class NcpProblem {
 public:
  NcpProblem(Index n, Evaluator f, JacobianEvaluator jac_f = {}, DomainGuard guard = {});

  Index dimension() const noexcept { return n_; }
  bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jac_f_); }

  /// Throws EvaluationError when x is outside the domain or f(x) is not finite.
  void check_domain(const Vector& x) const;
  bool in_domain(const Vector& x) const;

  /// f(x), domain-checked.
  Vector value(const Vector& x) const;

  /// f'(x): analytic when supplied, otherwise central differences.
  Matrix jacobian(const Vector& x) const;

  const Evaluator& map() const noexcept { return f_; }

 private:
  Index n_;
  Evaluator f_;
  JacobianEvaluator jac_f_;
  DomainGuard guard_;
};

/// One point (x, y, lambda) on or near the zero path.
struct HomotopyPoint {
  Vector x;
  Vector y;
  double lambda = 1.0;

  Index dimension() const noexcept { return x.size(); }

  /// (x, y, lambda) stacked into one vector of length 2n + 1.
  Vector packed() const;
  static HomotopyPoint unpack(const Vector& packed);

  /// The distinguished start point (x0, y0) at lambda = 1.
  static HomotopyPoint start(Vector x0, Vector y0);
};

/// (x o y, y - f(x)); a zero with (x, y) >= 0 solves the NCP.
Vector eval_F(const NcpProblem& problem, const Vector& x, const Vector& y);

/// H(point) for the homotopy anchored at `start`.
Vector eval_H(const NcpProblem& problem, const HomotopyPoint& point, const HomotopyPoint& start);

/// 2n x (2n+1) Jacobian of H with columns ordered (x, y, lambda):
///   [ diag(y)               diag(x)   -(x0 o y0) ]
///   [ -(1-lambda) f'(x)     I         f(x) - y0  ]
Matrix jac_H(const NcpProblem& problem, const HomotopyPoint& point, const HomotopyPoint& start);

/// Central-difference Jacobian with step max(1e-7, 1e-7 |x_i|) per coordinate.
Matrix fd_jacobian(const Evaluator& f, const Vector& x);

/// || min(x, f(x)) ||_inf; zero exactly at solutions of the NCP.
double ncp_residual(const NcpProblem& problem, const Vector& x);

}  // namespace eqtrace
