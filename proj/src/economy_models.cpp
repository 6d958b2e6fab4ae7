#include "eqtrace/economy_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace eqtrace {

namespace {

struct DemandParameters {
  Vector weights;   // s
  double exponent;  // b
};

DemandParameters parameters_of(const Consumer& c) {
  switch (c.family) {
    case DemandFamily::ces_a: return {c.shares.array().pow(0.2).matrix(), 0.2};
    case DemandFamily::ces_b: return {c.shares, c.elasticity};
    case DemandFamily::cobb_douglas: return {c.shares, 1.0};
  }
  throw std::logic_error("unknown demand family");
}

void check_prices(const Vector& p, Index goods) {
  if (p.size() != goods) throw EvaluationError("price vector has wrong dimension", -1);
  for (Index j = 0; j < goods; ++j) {
    if (!(p[j] > 0.0)) {
      throw EvaluationError("demand evaluated at nonpositive price of good " + std::to_string(j), j);
    }
  }
}

double income(const Consumer& c, const Vector& p) {
  const double m = p.dot(c.endowment);
  if (!(m > 0.0)) throw EvaluationError("consumer has zero income", -1);
  return m;
}

std::optional<Index> positive_prices(const Vector& z, Index goods) {
  for (Index j = 0; j < goods; ++j) {
    if (!(z[j] > 0.0)) return j;
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(DemandFamily family) noexcept {
  switch (family) {
    case DemandFamily::ces_a: return "ces-a";
    case DemandFamily::ces_b: return "ces-b";
    case DemandFamily::cobb_douglas: return "cobb-douglas";
  }
  return "unknown";
}

std::optional<DemandFamily> parse_demand_family(const std::string& name) {
  if (name == "ces-a") return DemandFamily::ces_a;
  if (name == "ces-b") return DemandFamily::ces_b;
  if (name == "cobb-douglas") return DemandFamily::cobb_douglas;
  return std::nullopt;
}

void Consumer::validate() const {
  if (shares.size() != endowment.size()) throw ModelError("shares: length differs from endowment");
  if (shares.size() == 0) throw ModelError("shares: empty");
  for (Index j = 0; j < shares.size(); ++j) {
    if (!std::isfinite(shares[j]) || shares[j] < 0.0) {
      throw ModelError("shares[" + std::to_string(j) + "]: must be finite and nonnegative");
    }
    if (!std::isfinite(endowment[j]) || endowment[j] < 0.0) {
      throw ModelError("endowment[" + std::to_string(j) + "]: must be finite and nonnegative");
    }
  }
  if (!(shares.maxCoeff() > 0.0)) throw ModelError("shares: need at least one positive entry");
  if (!(endowment.maxCoeff() > 0.0)) throw ModelError("endowment: need at least one positive entry");
  if (!std::isfinite(elasticity)) throw ModelError("elasticity: must be finite");
}

Vector demand(const Consumer& consumer, const Vector& p) {
  check_prices(p, consumer.shares.size());
  const auto [s, b] = parameters_of(consumer);
  const double m = income(consumer, p);
  const double denom = (s.array() * p.array().pow(1.0 - b)).sum();
  return (s.array() * p.array().pow(-b) * (m / denom)).matrix();
}

Matrix demand_jacobian(const Consumer& consumer, const Vector& p) {
  // dx_j/dp_l = x_j [ (w_l - (1-b) x_l) / m - delta_jl b / p_j ]
  const Vector x = demand(consumer, p);
  const double b = parameters_of(consumer).exponent;
  const double m = income(consumer, p);
  const Vector row = (consumer.endowment - (1.0 - b) * x) / m;
  Matrix J = x * row.transpose();
  J.diagonal().array() -= b * x.array() / p.array();
  return J;
}

ExchangeEconomy::ExchangeEconomy(Index goods, std::vector<Consumer> consumers)
    : goods_(goods), consumers_(std::move(consumers)), total_endowment_(Vector::Zero(goods)) {
  if (goods_ <= 0) throw ModelError("goods: must be positive");
  if (consumers_.empty()) throw ModelError("consumers: need at least one consumer");
  for (std::size_t i = 0; i < consumers_.size(); ++i) {
    const std::string where = "consumers[" + std::to_string(i) + "].";
    if (consumers_[i].shares.size() != goods_ || consumers_[i].endowment.size() != goods_) {
      throw ModelError(where + "shares/endowment: length must equal goods");
    }
    try {
      consumers_[i].validate();
    } catch (const ModelError& e) {
      throw ModelError(where + e.what());
    }
    total_endowment_ += consumers_[i].endowment;
  }
}

ProductionEconomy::ProductionEconomy(ExchangeEconomy exchange, Matrix activity_matrix)
    : exchange_(std::move(exchange)), activity_matrix_(std::move(activity_matrix)) {
  if (activity_matrix_.rows() != exchange_.goods()) {
    throw ModelError("activity_matrix: row count must equal goods");
  }
  if (activity_matrix_.cols() < 1) throw ModelError("activity_matrix: need at least one activity");
  if (!activity_matrix_.allFinite()) throw ModelError("activity_matrix: entries must be finite");
  for (Index j = 0; j < activity_matrix_.cols(); ++j) {
    if (activity_matrix_.col(j).cwiseAbs().maxCoeff() == 0.0) {
      throw ModelError("activity_matrix: column " + std::to_string(j) + " is all zero");
    }
  }
}

Vector excess_demand(const ExchangeEconomy& economy, const Vector& p) {
  Vector xi = -economy.total_endowment();
  for (const auto& c : economy.consumers()) xi += demand(c, p);
  return xi;
}

Matrix excess_demand_jacobian(const ExchangeEconomy& economy, const Vector& p) {
  Matrix J = Matrix::Zero(economy.goods(), economy.goods());
  for (const auto& c : economy.consumers()) J += demand_jacobian(c, p);
  return J;
}

const char* to_string(Normalization mode) noexcept {
  return mode == Normalization::none ? "none" : "replace-last-row";
}

std::optional<Normalization> parse_normalization(const std::string& name) {
  if (name == "none") return Normalization::none;
  if (name == "replace-last-row") return Normalization::replace_last_row;
  return std::nullopt;
}

NcpProblem exchange_ncp(const ExchangeEconomy& economy, Normalization normalization) {
  for (Index j = 0; j < economy.goods(); ++j) {
    if (!(economy.total_endowment()[j] > 0.0)) {
      throw ModelError("exchange economy: aggregate endowment of good " + std::to_string(j) +
                       " must be positive");
    }
  }
  auto econ = std::make_shared<const ExchangeEconomy>(economy);
  const bool replace = normalization == Normalization::replace_last_row;
  const Index D = economy.goods();
  auto f = [econ, replace, D](const Vector& p) -> Vector {
    Vector out = -excess_demand(*econ, p);
    if (replace) out[D - 1] = p.sum() - 1.0;
    return out;
  };
  auto jac = [econ, replace, D](const Vector& p) -> Matrix {
    Matrix J = -excess_demand_jacobian(*econ, p);
    if (replace) J.row(D - 1).setOnes();
    return J;
  };
  return NcpProblem(D, std::move(f), std::move(jac), strictly_positive);
}

NcpProblem production_ncp(const ProductionEconomy& economy, Normalization normalization) {
  auto econ = std::make_shared<const ProductionEconomy>(economy);
  const bool replace = normalization == Normalization::replace_last_row;
  const Index D = economy.goods();
  const Index J = economy.activities();
  auto f = [econ, replace, D, J](const Vector& z) -> Vector {
    const Matrix& A = econ->activity_matrix();
    const Vector p = z.head(D);
    Vector out(D + J);
    out.head(D) = A * z.tail(J) - excess_demand(econ->exchange(), p);
    out.tail(J) = -A.transpose() * p;
    if (replace) out[D + J - 1] = p.sum() - 1.0;
    return out;
  };
  auto jac = [econ, replace, D, J](const Vector& z) -> Matrix {
    const Matrix& A = econ->activity_matrix();
    Matrix M = Matrix::Zero(D + J, D + J);
    M.topLeftCorner(D, D) = -excess_demand_jacobian(econ->exchange(), z.head(D));
    M.topRightCorner(D, J) = A;
    M.bottomLeftCorner(J, D) = -A.transpose();
    if (replace) {
      M.row(D + J - 1).setZero();
      M.row(D + J - 1).head(D).setOnes();
    }
    return M;
  };
  auto guard = [D](const Vector& z) { return positive_prices(z, D); };
  return NcpProblem(D + J, std::move(f), std::move(jac), std::move(guard));
}

Vector normalize_prices(const Vector& p) {
  const double s = p.sum();
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("normalize_prices: price sum must be positive");
  }
  return p / s;
}

const ExchangeEconomy& EconomyModel::exchange() const {
  if (const auto* prod = std::get_if<ProductionEconomy>(&economy)) return prod->exchange();
  return std::get<ExchangeEconomy>(economy);
}

Index EconomyModel::activities() const {
  if (const auto* prod = std::get_if<ProductionEconomy>(&economy)) return prod->activities();
  return 0;
}

NcpProblem compile(const EconomyModel& model, std::optional<Normalization> normalization) {
  const Normalization mode = normalization.value_or(model.default_normalization());
  if (const auto* prod = std::get_if<ProductionEconomy>(&model.economy)) {
    return production_ncp(*prod, mode);
  }
  return exchange_ncp(std::get<ExchangeEconomy>(model.economy), mode);
}

double equilibrium_residual(const EconomyModel& model, const Vector& prices,
                            const std::optional<Vector>& activities) {
  const Index D = model.goods();
  const Index J = model.activities();
  if (prices.size() != D) throw std::invalid_argument("equilibrium_residual: wrong price length");
  Vector z = Vector::Zero(D + J);
  z.head(D) = normalize_prices(prices);
  if (J > 0 && activities) {
    if (activities->size() != J) {
      throw std::invalid_argument("equilibrium_residual: wrong activity length");
    }
    z.tail(J) = *activities;
  }
  return ncp_residual(compile(model, Normalization::none), z);
}

std::optional<std::string> match_known_equilibrium(const EconomyModel& model, const Vector& prices,
                                                   const std::optional<Vector>& activities,
                                                   double tolerance) {
  std::optional<std::string> best_label;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& known : model.known_equilibria) {
    if (known.prices.size() != prices.size()) continue;
    double d = (known.prices - prices).lpNorm<Eigen::Infinity>();
    if (known.activities && activities && known.activities->size() == activities->size()) {
      d = std::max(d, (*known.activities - *activities).lpNorm<Eigen::Infinity>());
    }
    if (d <= tolerance && d < best) {
      best = d;
      best_label = known.label;
    }
  }
  return best_label;
}

EquilibriumReport compute_equilibrium(const EconomyModel& model, const TraceConfig& cfg,
                                      const EquilibriumOptions& options) {
  const Index D = model.goods();
  const Index J = model.activities();
  const Index n = D + J;
  const Normalization mode = options.normalization.value_or(model.default_normalization());
  const NcpProblem problem = compile(model, mode);

  Vector x0 = Vector::Ones(n);
  if (options.start) {
    const Vector& s = *options.start;
    if (s.size() == n) {
      x0 = s;
    } else if (J > 0 && s.size() == D) {
      x0.head(D) = s;
    } else {
      throw std::invalid_argument("start point has " + std::to_string(s.size()) +
                                  " entries; expected " + std::to_string(n) +
                                  (J > 0 ? " or " + std::to_string(D) : std::string()));
    }
  }
  const Vector y0 = Vector::Ones(n);

  auto certified = [&model, D, J, &options](const Vector& z) {
    try {
      std::optional<Vector> acts;
      if (J > 0) acts = z.tail(J);
      return equilibrium_residual(model, z.head(D), acts) <= options.certify_tolerance;
    } catch (const std::exception&) {
      return false;
    }
  };

  EquilibriumReport report;
  report.normalization = mode;
  int failed_attempts = 0;
  try {
    report.solution = solve_ncp(problem, x0, y0, cfg, certified);
  } catch (const NoConvergenceError& e) {
    // Replacing the last row also admits points with the paired activity
    // idle and sum(p) > 1 that are not equilibria. Unless the caller asked
    // for this mode, retry on the unmodified conditions.
    if (options.normalization || mode != Normalization::replace_last_row) throw;
    failed_attempts = e.attempts();
    report.normalization = Normalization::none;
    report.solution = solve_ncp(compile(model, Normalization::none), x0, y0, cfg, certified);
    report.warnings.push_back("replace-last-row found no certified equilibrium in " +
                              std::to_string(failed_attempts) +
                              " attempts; solved with normalization none");
  }
  const Vector& z = report.solution.x;
  report.prices = normalize_prices(z.head(D));
  if (J > 0) report.activities = z.tail(J);
  report.complementarity_residual = equilibrium_residual(model, report.prices, report.activities);
  report.solver_residual = report.solution.residual;
  report.iterations = report.solution.trace.predictor_steps;
  report.restarts = report.solution.restarts_used + failed_attempts;
  report.matched_known_equilibrium =
      match_known_equilibrium(model, report.prices, report.activities, options.match_tolerance);
  if (report.normalization == Normalization::replace_last_row) {
    const double paired = z[n - 1];
    if (paired <= 1e-8) {
      report.warnings.push_back(
          "replace-last-row normalization is degenerate: the variable paired with the "
          "replaced row is zero at the solution");
    }
  }
  return report;
}

}  // namespace eqtrace
