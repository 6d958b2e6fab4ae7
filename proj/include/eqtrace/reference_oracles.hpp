#pragma once

// Brute-force reference solvers used to cross-check the path tracer.

#include "eqtrace/ncp_core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace eqtrace {

// LCP(M, q): x >= 0, Mx + q >= 0, x'(Mx + q) = 0.
struct LcpInstance {
  Matrix M;
  Vector q;

  Index dimension() const noexcept { return q.size(); }
  NcpProblem as_ncp() const;  // f(x) = Mx + q on all of R^n
};

inline constexpr Index kMaxEnumerationSize = 14;
inline constexpr double kSignTolerance = 1e-10;

/// Candidate for one support set (bit i of `support` set => x_i free):
/// solves M_SS x_S = -q_S, keeps it if x >= -1e-10 and Mx + q >= -1e-10,
/// and clamps x to be nonnegative. Singular M_SS yields nullopt.
std::optional<Vector> lcp_support_candidate(const LcpInstance& inst, std::uint32_t support);

/// Appends `x` unless an entry within 1e-8 (infinity norm) is already there.
void merge_distinct(std::vector<Vector>& solutions, const Vector& x);

/// All solutions found by enumerating the 2^n support sets, in support order.
std::vector<Vector> lcp_enumerate(const LcpInstance& inst);

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
};

/// Damped Newton (step halving while the residual does not decrease) on a
/// square system. Throws SingularMatrixError or NoConvergenceError.
NewtonResult newton_square_solve(const Evaluator& system, const JacobianEvaluator& jacobian,
                                 const Vector& x0, const NewtonOptions& options = {});

}  // namespace eqtrace
