#include "eqtrace/ncp_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace eqtrace {

std::optional<Index> strictly_positive(const Vector& x) {
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) return i;
  }
  return std::nullopt;
}

std::optional<Index> unrestricted(const Vector&) { return std::nullopt; }

NcpProblem::NcpProblem(Index n, Evaluator f, JacobianEvaluator jac_f, DomainGuard guard)
    : n_(n), f_(std::move(f)), jac_f_(std::move(jac_f)), guard_(std::move(guard)) {
  if (n_ <= 0) throw std::invalid_argument("NcpProblem: dimension must be positive");
  if (!f_) throw std::invalid_argument("NcpProblem: missing map");
  if (!guard_) guard_ = strictly_positive;
}

void NcpProblem::check_domain(const Vector& x) const {
  if (x.size() != n_) {
    throw EvaluationError("dimension mismatch: expected " + std::to_string(n_) + ", got " +
                              std::to_string(x.size()),
                          -1);
  }
  if (auto bad = guard_(x)) {
    throw EvaluationError("point outside domain at coordinate " + std::to_string(*bad), *bad);
  }
}

bool NcpProblem::in_domain(const Vector& x) const {
  return x.size() == n_ && !guard_(x).has_value();
}

Vector NcpProblem::value(const Vector& x) const {
  check_domain(x);
  Vector fx = f_(x);
  if (fx.size() != n_) throw EvaluationError("map returned wrong dimension", -1);
  for (Index i = 0; i < n_; ++i) {
    if (!std::isfinite(fx[i])) {
      throw EvaluationError("non-finite map value at component " + std::to_string(i), i);
    }
  }
  return fx;
}

Matrix NcpProblem::jacobian(const Vector& x) const {
  check_domain(x);
  if (!jac_f_) return fd_jacobian(f_, x);
  Matrix J = jac_f_(x);
  if (J.rows() != n_ || J.cols() != n_) throw EvaluationError("Jacobian has wrong shape", -1);
  if (!J.allFinite()) throw EvaluationError("non-finite Jacobian entry", -1);
  return J;
}

Vector HomotopyPoint::packed() const {
  const Index n = x.size();
  Vector u(2 * n + 1);
  u.head(n) = x;
  u.segment(n, n) = y;
  u[2 * n] = lambda;
  return u;
}

HomotopyPoint HomotopyPoint::unpack(const Vector& packed) {
  const Index n = (packed.size() - 1) / 2;
  return HomotopyPoint{packed.head(n), packed.segment(n, n), packed[2 * n]};
}

HomotopyPoint HomotopyPoint::start(Vector x0, Vector y0) {
  return HomotopyPoint{std::move(x0), std::move(y0), 1.0};
}

Vector eval_F(const NcpProblem& problem, const Vector& x, const Vector& y) {
  const Index n = problem.dimension();
  const Vector fx = problem.value(x);
  Vector F(2 * n);
  F.head(n) = x.cwiseProduct(y);
  F.tail(n) = y - fx;
  return F;
}

Vector eval_H(const NcpProblem& problem, const HomotopyPoint& point, const HomotopyPoint& start) {
  const Index n = problem.dimension();
  const double lam = point.lambda;
  const Vector fx = problem.value(point.x);
  // Same operation order as eval_F so that lambda = 0 reproduces it bit for bit
  // and the start point at lambda = 1 cancels exactly.
  Vector H(2 * n);
  H.head(n) = point.x.cwiseProduct(point.y) - lam * start.x.cwiseProduct(start.y);
  H.tail(n) = (point.y - (1.0 - lam) * fx) - lam * start.y;
  return H;
}

Matrix jac_H(const NcpProblem& problem, const HomotopyPoint& point, const HomotopyPoint& start) {
  const Index n = problem.dimension();
  const double lam = point.lambda;
  const Vector fx = problem.value(point.x);
  Matrix J = Matrix::Zero(2 * n, 2 * n + 1);
  J.topLeftCorner(n, n).diagonal() = point.y;
  J.block(0, n, n, n).diagonal() = point.x;
  J.block(0, 2 * n, n, 1) = -start.x.cwiseProduct(start.y);
  if (lam != 1.0) J.bottomLeftCorner(n, n) = -(1.0 - lam) * problem.jacobian(point.x);
  J.block(n, n, n, n).diagonal().setOnes();
  J.block(n, 2 * n, n, 1) = fx - start.y;
  return J;
}

Matrix fd_jacobian(const Evaluator& f, const Vector& x) {
  const Index n = x.size();
  Matrix J;
  Vector xp = x;
  for (Index i = 0; i < n; ++i) {
    const double h = std::max(1e-7, 1e-7 * std::abs(x[i]));
    xp[i] = x[i] + h;
    const Vector fp = f(xp);
    xp[i] = x[i] - h;
    const Vector fm = f(xp);
    xp[i] = x[i];
    if (!fp.allFinite() || !fm.allFinite()) {
      throw EvaluationError("non-finite value in finite difference along coordinate " +
                                std::to_string(i),
                            i);
    }
    if (i == 0) J.resize(fp.size(), n);
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

double ncp_residual(const NcpProblem& problem, const Vector& x) {
  const Vector fx = problem.value(x);
  return x.cwiseMin(fx).lpNorm<Eigen::Infinity>();
}

}  // namespace eqtrace
