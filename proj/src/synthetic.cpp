#include "eqtrace/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace eqtrace {

EconomyModel make_synthetic_production(const SyntheticProductionSpec& spec) {
  const Index D = spec.goods;
  const Index J = spec.activities;
  if (D < 2 || J < 1 || spec.consumers < 1 || spec.active < 1 || spec.active > J) {
    throw std::invalid_argument("make_synthetic_production: invalid dimensions");
  }
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Vector p(D);
  for (Index d = 0; d < D; ++d) p[d] = uniform(0.5, 1.5);
  p /= p.sum();

  std::vector<Consumer> consumers;
  for (int i = 0; i < spec.consumers; ++i) {
    Consumer c;
    c.family = DemandFamily::cobb_douglas;
    c.shares.resize(D);
    c.endowment.resize(D);
    for (Index d = 0; d < D; ++d) {
      c.shares[d] = uniform(0.1, 1.0);
      c.endowment[d] = uniform(0.0, 5.0);
    }
    consumers.push_back(std::move(c));
  }
  ExchangeEconomy exchange(D, std::move(consumers));
  const Vector xi = excess_demand(exchange, p);

  std::vector<Index> order(static_cast<std::size_t>(J));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<Index> operated(order.begin(), order.begin() + spec.active);

  const double pp = p.squaredNorm();
  Matrix A(D, J);
  Vector y = Vector::Zero(J);
  for (Index j = 0; j < J; ++j) {
    for (Index d = 0; d < D; ++d) A(d, j) = uniform(-1.0, 1.0);
    A.col(j) -= (p.dot(A.col(j)) / pp) * p;  // break even at p
  }
  for (Index j : operated) y[j] = uniform(0.5, 2.0);
  // Close the market: A y = xi. Both sides are orthogonal to p, so the
  // adjusted column still breaks even.
  const Index last = operated.back();
  const Vector rest = A * y - A.col(last) * y[last];
  A.col(last) = (xi - rest) / y[last];
  for (Index j = 0; j < J; ++j) {
    if (y[j] > 0.0) continue;
    A.col(j) -= (uniform(0.05, 0.5) / pp) * p;  // strictly unprofitable at p
  }

  return EconomyModel{"synthetic",
                      ProductionEconomy(std::move(exchange), std::move(A)),
                      {{p, y, "constructed"}}};
}

}  // namespace eqtrace
