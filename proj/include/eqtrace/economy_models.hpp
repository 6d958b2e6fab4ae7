#pragma once

// Exchange and linear-activity production economies, closed-form demand
// systems, and their compilation into complementarity problems.

#include "eqtrace/ncp_core.hpp"
#include "eqtrace/path_tracer.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace eqtrace {

// Every family is the demand of the form
//
//   x_j = s_j m p_j^{-b} / sum_k s_k p_k^{1-b},   m = p'w,
//
// with (s, b) = (a^{1/5}, 1/5) for CES-A, (a, elasticity) for CES-B, and
// (a, 1) for Cobb-Douglas.
enum class DemandFamily { ces_a, ces_b, cobb_douglas };

const char* to_string(DemandFamily family) noexcept;
std::optional<DemandFamily> parse_demand_family(const std::string& name);

struct Consumer {
  DemandFamily family = DemandFamily::cobb_douglas;
  Vector shares;
  Vector endowment;
  double elasticity = 1.0;  // CES-B only

  /// Throws ModelError naming the offending field.
  void validate() const;
};

/// Demand at strictly positive prices. Throws EvaluationError for a
/// nonpositive price or zero income.
Vector demand(const Consumer& consumer, const Vector& p);

/// d demand / d p (D x D).
Matrix demand_jacobian(const Consumer& consumer, const Vector& p);

class ExchangeEconomy {
 public:
  ExchangeEconomy(Index goods, std::vector<Consumer> consumers);

  Index goods() const noexcept { return goods_; }
  const std::vector<Consumer>& consumers() const noexcept { return consumers_; }
  const Vector& total_endowment() const noexcept { return total_endowment_; }

 private:
  Index goods_;
  std::vector<Consumer> consumers_;
  Vector total_endowment_;
};

class ProductionEconomy {
 public:
  /// activity_matrix is D x J: positive entries are outputs, negative inputs.
  ProductionEconomy(ExchangeEconomy exchange, Matrix activity_matrix);

  const ExchangeEconomy& exchange() const noexcept { return exchange_; }
  const Matrix& activity_matrix() const noexcept { return activity_matrix_; }
  Index goods() const noexcept { return exchange_.goods(); }
  Index activities() const noexcept { return activity_matrix_.cols(); }

 private:
  ExchangeEconomy exchange_;
  Matrix activity_matrix_;
};

/// Sum of demands minus aggregate endowment.
Vector excess_demand(const ExchangeEconomy& economy, const Vector& p);
Matrix excess_demand_jacobian(const ExchangeEconomy& economy, const Vector& p);

enum class Normalization { none, replace_last_row };

const char* to_string(Normalization mode) noexcept;
std::optional<Normalization> parse_normalization(const std::string& name);

/// NCP with f(p) = -excess_demand(p). With replace_last_row the last
/// component becomes sum(p) - 1.
NcpProblem exchange_ncp(const ExchangeEconomy& economy,
                        Normalization normalization = Normalization::none);

/// NCP over z = (p, y) with f(z) = (A y - excess_demand(p), -A'p). With
/// replace_last_row the last component becomes sum(p) - 1. Only the price
/// block is domain-guarded; activity levels may sit at zero.
NcpProblem production_ncp(const ProductionEconomy& economy,
                          Normalization normalization = Normalization::replace_last_row);

/// p / sum(p). Throws std::invalid_argument unless the sum is positive.
Vector normalize_prices(const Vector& p);

struct KnownEquilibrium {
  Vector prices;
  std::optional<Vector> activities;
  std::string label;
};

struct EconomyModel {
  std::string name;
  std::variant<ExchangeEconomy, ProductionEconomy> economy;
  std::vector<KnownEquilibrium> known_equilibria;

  bool is_production() const noexcept {
    return std::holds_alternative<ProductionEconomy>(economy);
  }
  const ExchangeEconomy& exchange() const;
  Index goods() const { return exchange().goods(); }
  Index activities() const;
  /// NCP dimension: D, or D + J for production.
  Index dimension() const { return goods() + activities(); }
  Normalization default_normalization() const noexcept {
    return is_production() ? Normalization::replace_last_row : Normalization::none;
  }
};

/// Compiles the model with the given (or default) normalization.
NcpProblem compile(const EconomyModel& model, std::optional<Normalization> normalization = {});

/// ncp_residual of the un-normalized equilibrium conditions at
/// (prices, activities); the prices are simplex-normalized first.
double equilibrium_residual(const EconomyModel& model, const Vector& prices,
                            const std::optional<Vector>& activities = std::nullopt);

struct EquilibriumReport {
  Vector prices;                         // on the simplex
  std::optional<Vector> activities;
  double complementarity_residual = 0.0; // equilibrium_residual at the reported point
  double solver_residual = 0.0;          // ncp_residual of the compiled problem at the raw solution
  int iterations = 0;
  int restarts = 0;
  std::optional<std::string> matched_known_equilibrium;
  std::vector<std::string> warnings;
  Normalization normalization = Normalization::none;
  NcpSolution solution;
};

struct EquilibriumOptions {
  std::optional<Vector> start;                 // prices (and activities); default all ones
  std::optional<Normalization> normalization;  // default per model kind
  // A converged endpoint is accepted only if the un-normalized conditions
  // hold to this tolerance; otherwise the solver restarts.
  double certify_tolerance = 1e-4;
  double match_tolerance = 1e-2;
};

/// Compiles, solves from x0 = start (or ones) and y0 = ones, and reports
/// simplex-normalized prices. Throws NoConvergenceError.
EquilibriumReport compute_equilibrium(const EconomyModel& model, const TraceConfig& cfg,
                                      const EquilibriumOptions& options = {});

/// Label of the nearest known equilibrium within `tolerance` (infinity norm
/// over prices and, when both are present, activities).
std::optional<std::string> match_known_equilibrium(const EconomyModel& model, const Vector& prices,
                                                   const std::optional<Vector>& activities,
                                                   double tolerance);

}  // namespace eqtrace
