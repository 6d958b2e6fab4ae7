#include "eqtrace/reference_oracles.hpp"

#include <stdexcept>
#include <string>

namespace eqtrace {

NcpProblem LcpInstance::as_ncp() const {
  auto f = [M = M, q = q](const Vector& x) -> Vector { return M * x + q; };
  auto jac = [M = M](const Vector&) -> Matrix { return M; };
  return NcpProblem(q.size(), std::move(f), std::move(jac), unrestricted);
}

std::optional<Vector> lcp_support_candidate(const LcpInstance& inst, std::uint32_t support) {
  const Index n = inst.dimension();
  std::vector<Index> idx;
  for (Index i = 0; i < n; ++i) {
    if (support & (1u << i)) idx.push_back(i);
  }
  Vector x = Vector::Zero(n);
  const Index k = static_cast<Index>(idx.size());
  if (k > 0) {
    Matrix Mss(k, k);
    Vector rhs(k);
    for (Index a = 0; a < k; ++a) {
      rhs[a] = -inst.q[idx[a]];
      for (Index b = 0; b < k; ++b) Mss(a, b) = inst.M(idx[a], idx[b]);
    }
    Eigen::FullPivLU<Matrix> lu(Mss);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector xs = lu.solve(rhs);
    for (Index a = 0; a < k; ++a) x[idx[a]] = xs[a];
  }
  if ((x.array() < -kSignTolerance).any()) return std::nullopt;
  const Vector w = inst.M * x + inst.q;
  if ((w.array() < -kSignTolerance).any()) return std::nullopt;
  return x.cwiseMax(0.0);
}

void merge_distinct(std::vector<Vector>& solutions, const Vector& x) {
  for (const auto& s : solutions) {
    if ((s - x).lpNorm<Eigen::Infinity>() <= 1e-8) return;
  }
  solutions.push_back(x);
}

std::vector<Vector> lcp_enumerate(const LcpInstance& inst) {
  const Index n = inst.dimension();
  if (inst.M.rows() != n || inst.M.cols() != n) {
    throw std::invalid_argument("lcp_enumerate: M must be n x n");
  }
  if (n > kMaxEnumerationSize) {
    throw std::invalid_argument("lcp_enumerate: n must be at most " +
                                std::to_string(kMaxEnumerationSize));
  }
  std::vector<Vector> out;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (auto x = lcp_support_candidate(inst, s)) merge_distinct(out, *x);
  }
  return out;
}

NewtonResult newton_square_solve(const Evaluator& system, const JacobianEvaluator& jacobian,
                                 const Vector& x0, const NewtonOptions& options) {
  NewtonResult out{x0, 0};
  Vector g = system(out.x);
  double r = g.lpNorm<Eigen::Infinity>();
  while (r > options.tolerance) {
    if (out.iterations >= options.max_iterations) {
      throw NoConvergenceError("newton_square_solve: iteration limit reached", r,
                               out.iterations);
    }
    Eigen::FullPivLU<Matrix> lu(jacobian(out.x));
    if (!lu.isInvertible()) throw SingularMatrixError("newton_square_solve: singular Jacobian");
    const Vector step = lu.solve(g);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Vector cand = out.x - t * step;
      Vector gc;
      try {
        gc = system(cand);
      } catch (const EvaluationError&) {
        continue;
      }
      const double rc = gc.lpNorm<Eigen::Infinity>();
      if (gc.allFinite() && rc < r) {
        out.x = cand;
        g = std::move(gc);
        r = rc;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted) {
      throw NoConvergenceError("newton_square_solve: no descent along the Newton direction", r,
                               out.iterations);
    }
  }
  return out;
}

}  // namespace eqtrace
