#include "eqtrace/path_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace eqtrace {

namespace {

constexpr double kRankTolerance = 1e-12;

// QR of M' (k x m, k >= m) with column pivoting; throws unless M has full
// row rank.
Eigen::ColPivHouseholderQR<Matrix> factor_transpose(const Matrix& M) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M.transpose());
  const Index m = M.rows();
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  const double largest = m > 0 ? diag[0] : 0.0;
  if (!(largest > 0.0) || !(diag[m - 1] > kRankTolerance * largest)) {
    throw SingularMatrixError("matrix is not of full row rank");
  }
  return qr;
}

double inf_norm(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

bool strictly_positive_pair(const HomotopyPoint& p) {
  return (p.x.array() > 0.0).all() && (p.y.array() > 0.0).all();
}

}  // namespace

void TraceConfig::validate() const {
  if (!(0.0 < h_min && h_min <= h0 && h0 <= h_max && h_max < 1.0)) {
    throw std::invalid_argument("TraceConfig: need 0 < h_min <= h0 <= h_max < 1");
  }
  if (!(eps_lambda > 0.0 && eps_residual > 0.0)) {
    throw std::invalid_argument("TraceConfig: tolerances must be positive");
  }
  if (max_iterations <= 0 || corrector_max <= 0 || restart_max < 0) {
    throw std::invalid_argument("TraceConfig: iteration limits must be positive");
  }
}

const char* to_string(TraceStatus status) noexcept {
  switch (status) {
    case TraceStatus::converged: return "converged";
    case TraceStatus::max_iterations: return "max_iterations";
    case TraceStatus::stalled: return "stalled";
    case TraceStatus::diverged: return "diverged";
  }
  return "unknown";
}

Vector tangent(const Matrix& J, const std::optional<Vector>& previous) {
  const Index k = J.cols();
  if (J.rows() + 1 != k) throw std::invalid_argument("tangent: J must be m x (m+1)");
  const auto qr = factor_transpose(J);
  // The last Householder column is orthogonal to every row of J.
  Vector t = qr.householderQ() * Vector::Unit(k, k - 1);
  t.normalize();
  if (previous) {
    if (t.dot(*previous) < 0.0) t = -t;
  } else if (t[k - 1] > 0.0) {
    t = -t;
  }
  return t;
}

Vector least_norm_solve(const Matrix& A, const Vector& b) {
  const Index m = A.rows();
  const Index k = A.cols();
  if (m > k) throw std::invalid_argument("least_norm_solve: need rows <= cols");
  if (b.size() != m) throw std::invalid_argument("least_norm_solve: rhs size mismatch");
  const auto qr = factor_transpose(A);
  // A'P = QR  =>  R1' (Q'z)_{1..m} = P'b, and the remaining part of Q'z is 0.
  const Vector pb = qr.colsPermutation().transpose() * b;
  Vector c = Vector::Zero(k);
  c.head(m) = qr.matrixQR()
                  .topLeftCorner(m, m)
                  .triangularView<Eigen::Upper>()
                  .transpose()
                  .solve(pb);
  return qr.householderQ() * c;
}

HomotopyPoint predictor(const HomotopyPoint& u, const Vector& t, double h) {
  return HomotopyPoint::unpack(u.packed() + h * t);
}

CorrectorResult corrector(const NcpProblem& problem, const HomotopyPoint& v,
                          const HomotopyPoint& start, const TraceConfig& cfg) {
  CorrectorResult out{v, 0, CorrectorFailure::none};
  if (!(v.x.array() > 0.0).all()) {
    out.failure = CorrectorFailure::positivity;
    return out;
  }
  Vector H;
  try {
    H = eval_H(problem, v, start);
  } catch (const EvaluationError&) {
    out.failure = CorrectorFailure::evaluation;
    return out;
  }
  double r = inf_norm(H);
  int increases = 0;
  Vector w = v.packed();
  for (int k = 0;; ++k) {
    out.steps = k;
    out.point = HomotopyPoint::unpack(w);
    if (r <= cfg.eps_residual) return out;
    if (k == cfg.corrector_max) {
      out.failure = CorrectorFailure::max_steps;
      return out;
    }
    try {
      w -= least_norm_solve(jac_H(problem, out.point, start), H);
    } catch (const SingularMatrixError&) {
      out.failure = CorrectorFailure::singular;
      return out;
    } catch (const EvaluationError&) {
      out.failure = CorrectorFailure::evaluation;
      return out;
    }
    const HomotopyPoint next = HomotopyPoint::unpack(w);
    if (!(next.x.array() > 0.0).all()) {
      out.steps = k + 1;
      out.point = next;
      out.failure = CorrectorFailure::positivity;
      return out;
    }
    try {
      H = eval_H(problem, next, start);
    } catch (const EvaluationError&) {
      out.steps = k + 1;
      out.failure = CorrectorFailure::evaluation;
      return out;
    }
    const double r_next = inf_norm(H);
    increases = r_next > r ? increases + 1 : 0;
    r = r_next;
    if (increases >= 2) {
      out.steps = k + 1;
      out.point = next;
      out.failure = CorrectorFailure::diverging;
      return out;
    }
  }
}

double adapt_steplength(double h, int corrector_steps, bool failed, const TraceConfig& cfg) {
  if (failed) return h / 2.0;
  if (corrector_steps <= 2) return std::min(2.0 * h, cfg.h_max);
  if (corrector_steps >= 5) return std::max(h / 2.0, cfg.h_min);
  return h;
}

PolishResult polish_at_zero(const NcpProblem& problem, const HomotopyPoint& w,
                            const HomotopyPoint& start, int max_steps, double target) {
  const Index n = problem.dimension();
  PolishResult out{HomotopyPoint{w.x, w.y, 0.0}, std::numeric_limits<double>::infinity(), 0};
  Vector F;
  try {
    F = eval_H(problem, out.point, start);
  } catch (const EvaluationError&) {
    return out;
  }
  out.residual = inf_norm(F);
  while (out.steps < max_steps && out.residual > target) {
    Vector d;
    try {
      const Matrix J = jac_H(problem, out.point, start).leftCols(2 * n);
      d = J.completeOrthogonalDecomposition().solve(F);
    } catch (const EvaluationError&) {
      break;
    }
    bool improved = false;
    double alpha = 1.0;
    for (int halving = 0; halving < 30 && !improved; ++halving, alpha *= 0.5) {
      HomotopyPoint cand{out.point.x - alpha * d.head(n), out.point.y - alpha * d.tail(n), 0.0};
      if (!(cand.x.array() > 0.0).all() || !problem.in_domain(cand.x)) continue;
      try {
        Vector Fc = eval_H(problem, cand, start);
        const double rc = inf_norm(Fc);
        if (rc < out.residual) {
          out.point = std::move(cand);
          out.residual = rc;
          F = std::move(Fc);
          improved = true;
        }
      } catch (const EvaluationError&) {
      }
    }
    if (!improved) break;
    ++out.steps;
  }
  return out;
}

TraceResult trace(const NcpProblem& problem, const HomotopyPoint& start, const TraceConfig& cfg) {
  cfg.validate();
  const Index n = problem.dimension();
  if (start.x.size() != n || start.y.size() != n) {
    throw std::invalid_argument("trace: start point has wrong dimension");
  }
  if (!strictly_positive_pair(start)) throw std::invalid_argument("trace: start must be positive");
  if (start.lambda != 1.0) throw std::invalid_argument("trace: start must have lambda = 1");

  TraceResult res;
  res.endpoint = start;
  HomotopyPoint u = start;
  double h = cfg.h0;
  std::optional<Vector> previous;
  int accepted = 0;
  const double endgame_scale = inf_norm(start.x.cwiseProduct(start.y));

  auto finish = [&](TraceStatus status, std::string message) {
    res.status = status;
    res.endpoint = u;
    res.message = std::move(message);
    return res;
  };

  while (u.lambda > cfg.eps_lambda) {
    if (res.predictor_steps >= cfg.max_iterations) {
      return finish(TraceStatus::max_iterations, "predictor budget exhausted");
    }
    Vector t;
    try {
      t = tangent(jac_H(problem, u, start), previous);
    } catch (const SingularMatrixError&) {
      return finish(TraceStatus::diverged, "homotopy Jacobian lost full rank");
    } catch (const EvaluationError& e) {
      return finish(TraceStatus::diverged, e.what());
    }

    // Keep the predicted lambda inside [0, 1].
    const double t_lam = t[2 * n];
    double step = h;
    bool lands_at_zero = false;
    if (u.lambda + step * t_lam < 0.0) {
      step = u.lambda / -t_lam;
      lands_at_zero = true;
    } else if (u.lambda + step * t_lam > 1.0) {
      step = (1.0 - u.lambda) / t_lam;
    }
    HomotopyPoint v = predictor(u, t, step);
    if (lands_at_zero) v.lambda = 0.0;
    ++res.predictor_steps;

    CorrectorResult c = corrector(problem, v, start, cfg);
    bool ok = c.ok();
    HomotopyPoint w = std::move(c.point);
    int steps = c.steps;
    if (ok) {
      ok = w.lambda >= -cfg.eps_lambda && w.lambda <= 1.0 &&
           (w.lambda <= cfg.eps_lambda || strictly_positive_pair(w));
    }
    if (ok && w.lambda < 0.0) {
      // Slight undershoot below zero: pull back onto lambda = 0.
      const PolishResult p = polish_at_zero(problem, w, start, cfg.corrector_max, cfg.eps_residual);
      ok = p.residual <= cfg.eps_residual;
      w = p.point;
      steps += p.steps;
    }
    if (!ok && u.lambda * endgame_scale <= 10.0 * cfg.eps_residual) {
      // The product block is already within tolerance of F: finish with
      // Newton at lambda = 0 instead of tracing further.
      const PolishResult p = polish_at_zero(problem, u, start, cfg.corrector_max, cfg.eps_residual);
      if (p.residual <= cfg.eps_residual && p.point.x.minCoeff() >= -cfg.eps_residual &&
          p.point.y.minCoeff() >= -cfg.eps_residual) {
        u = p.point;
        res.corrector_steps_total += steps + p.steps;
        res.path_log.push_back(PathRecord{++accepted, 0.0, p.residual, 0.0, t_lam, u.packed()});
        res.tangents.push_back(t);
        break;
      }
    }
    if (!ok) {
      h = adapt_steplength(h, steps, true, cfg);
      if (h < cfg.h_min) return finish(TraceStatus::stalled, "steplength fell below h_min");
      continue;
    }
    if (std::max(inf_norm(w.x), inf_norm(w.y)) > cfg.divergence_bound) {
      u = w;
      return finish(TraceStatus::diverged, "path left the divergence bound");
    }

    u = std::move(w);
    res.corrector_steps_total += steps;
    const double r = inf_norm(eval_H(problem, u, start));
    res.path_log.push_back(PathRecord{++accepted, u.lambda, r, step, t_lam, u.packed()});
    res.tangents.push_back(t);
    previous = std::move(t);
    h = adapt_steplength(h, steps, false, cfg);
  }

  res.status = TraceStatus::converged;
  res.endpoint = u;
  if (cfg.final_polish) {
    const PolishResult p = polish_at_zero(problem, u, start, cfg.corrector_max);
    if (p.residual <= cfg.eps_residual) res.endpoint = p.point;
  }
  return res;
}

NcpSolution solve_ncp(const NcpProblem& problem, const Vector& x0, const Vector& y0,
                      const TraceConfig& cfg, const EndpointCheck& accept) {
  cfg.validate();
  const Index n = problem.dimension();
  if (x0.size() != n || y0.size() != n) throw std::invalid_argument("solve_ncp: wrong start size");
  if (!(x0.array() > 0.0).all() || !(y0.array() > 0.0).all()) {
    throw std::invalid_argument("solve_ncp: start must be strictly positive");
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> draw(0.1, 2.0);
  HomotopyPoint start = HomotopyPoint::start(x0, y0);
  double best = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt <= cfg.restart_max; ++attempt) {
    TraceResult tr = trace(problem, start, cfg);
    double r = std::numeric_limits<double>::infinity();
    try {
      r = ncp_residual(problem, tr.endpoint.x);
    } catch (const EvaluationError&) {
    }
    if (tr.status == TraceStatus::converged && (!accept || accept(tr.endpoint.x))) {
      tr.restarts_used = attempt;
      NcpSolution sol;
      sol.x = tr.endpoint.x;
      sol.y = tr.endpoint.y;
      sol.residual = r;
      sol.restarts_used = attempt;
      sol.start = start;
      sol.trace = std::move(tr);
      return sol;
    }
    best = std::min(best, r);
    if (attempt < cfg.restart_max) {
      for (Index i = 0; i < n; ++i) start.x[i] = draw(rng);
      for (Index i = 0; i < n; ++i) start.y[i] = draw(rng);
    }
  }
  throw NoConvergenceError("no convergence after " + std::to_string(cfg.restart_max + 1) +
                               " attempts",
                           best, cfg.restart_max + 1);
}

}  // namespace eqtrace
