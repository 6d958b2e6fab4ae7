#pragma once

// Euler-Newton predictor-corrector tracing of the homotopy zero path from
// lambda = 1 down to lambda = 0, with Moore-Penrose (minimum-norm) Newton
// corrections and probability-one restarts from fresh positive start points.

#include "eqtrace/ncp_core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace eqtrace {

struct TraceConfig {
  double eps_lambda = 1e-6;    // stop once lambda <= eps_lambda
  double eps_residual = 1e-5;  // corrector tolerance on ||H||_inf
  double h0 = 0.3;
  double h_min = 1e-8;
  double h_max = 0.5;
  int max_iterations = 1000;   // predictor steps, rejected ones included
  int corrector_max = 10;
  int restart_max = 5;
  std::uint64_t rng_seed = 0;
  bool final_polish = true;
  // Accepted points with ||(x, y)||_inf above this count as divergence.
  double divergence_bound = 1e10;

  /// Throws std::invalid_argument unless 0 < h_min <= h0 <= h_max < 1 and
  /// all tolerances are positive.
  void validate() const;
};

enum class TraceStatus { converged, max_iterations, stalled, diverged };

const char* to_string(TraceStatus status) noexcept;

struct PathRecord {
  int step = 0;
  double lambda = 0.0;
  double residual = 0.0;       // ||H||_inf at the accepted point
  double steplength = 0.0;     // h actually used by the predictor
  double tangent_lambda = 0.0; // lambda component of the predictor tangent
  Vector point;                // packed (x, y, lambda)
};

struct TraceResult {
  TraceStatus status = TraceStatus::diverged;
  HomotopyPoint endpoint;
  int predictor_steps = 0;
  int corrector_steps_total = 0;
  int restarts_used = 0;
  std::vector<PathRecord> path_log;
  std::vector<Vector> tangents;  // tangent used for each accepted step
  std::string message;
};

/// Unit kernel vector of the 2n x (2n+1) matrix J. With `previous`, oriented
/// so that t . previous > 0; otherwise its lambda component is negative.
/// Throws SingularMatrixError when J is not of full row rank.
Vector tangent(const Matrix& J, const std::optional<Vector>& previous = std::nullopt);

/// Minimum-norm solution of A z = b for a full-row-rank A (m <= k), i.e.
/// A'(AA')^{-1} b, computed from a QR factorization of A'.
Vector least_norm_solve(const Matrix& A, const Vector& b);

/// Euler step u + h t over the packed (x, y, lambda) coordinates.
HomotopyPoint predictor(const HomotopyPoint& u, const Vector& t, double h);

enum class CorrectorFailure { none, max_steps, diverging, positivity, singular, evaluation };

struct CorrectorResult {
  HomotopyPoint point;
  int steps = 0;
  CorrectorFailure failure = CorrectorFailure::none;

  bool ok() const noexcept { return failure == CorrectorFailure::none; }
};

/// Newton iteration w <- w - H'(w)^+ H(w) over (x, y, lambda) until
/// ||H(w)||_inf <= eps_residual.
CorrectorResult corrector(const NcpProblem& problem, const HomotopyPoint& v,
                          const HomotopyPoint& start, const TraceConfig& cfg);

/// Steplength feedback: halve on failure, double (capped at h_max) after a
/// corrector that needed <= 2 steps, halve (floored at h_min) after >= 5.
double adapt_steplength(double h, int corrector_steps, bool failed, const TraceConfig& cfg);

/// Damped minimum-norm Newton on F(x, y) = 0 with lambda held at zero.
/// A step is taken only if it keeps x inside the domain and reduces
/// ||F||_inf. Returns the improved point (lambda = 0) and its residual.
struct PolishResult {
  HomotopyPoint point;
  double residual = 0.0;
  int steps = 0;
};
PolishResult polish_at_zero(const NcpProblem& problem, const HomotopyPoint& w,
                            const HomotopyPoint& start, int max_steps, double target = 0.0);

/// Follows the zero path from `start` (lambda = 1).
TraceResult trace(const NcpProblem& problem, const HomotopyPoint& start, const TraceConfig& cfg);

struct NcpSolution {
  Vector x;
  Vector y;
  double residual = 0.0;  // ncp_residual at x
  TraceResult trace;      // the successful attempt
  int restarts_used = 0;
  HomotopyPoint start;    // start point of the successful attempt
};

// Extra acceptance test applied to a converged endpoint; rejecting it counts
// as a failed attempt and triggers a restart.
using EndpointCheck = std::function<bool(const Vector& x)>;

/// Traces from (x0, y0); on failure redraws the start uniformly from
/// [0.1, 2] with a generator seeded by cfg.rng_seed, up to cfg.restart_max
/// times. Throws NoConvergenceError carrying the best residual seen.
NcpSolution solve_ncp(const NcpProblem& problem, const Vector& x0, const Vector& y0,
                      const TraceConfig& cfg, const EndpointCheck& accept = {});

}  // namespace eqtrace
