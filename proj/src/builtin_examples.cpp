#include "eqtrace/builtin_examples.hpp"

#include <initializer_list>

namespace eqtrace {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Consumer consumer(DemandFamily family, Vector shares, Vector endowment, double elasticity = 1.0) {
  return Consumer{family, std::move(shares), std::move(endowment), elasticity};
}

EconomyModel example1() {
  std::vector<Consumer> cs{
      consumer(DemandFamily::ces_a, vec({1024, 1}), vec({12, 1})),
      consumer(DemandFamily::ces_a, vec({1, 1024}), vec({1, 12})),
  };
  return EconomyModel{"ex1",
                      ExchangeEconomy(2, std::move(cs)),
                      {{vec({0.5, 0.5}), std::nullopt, "p1*"},
                       {vec({0.1129, 0.8871}), std::nullopt, "p2*"},
                       {vec({0.8871, 0.1129}), std::nullopt, "p3*"}}};
}

EconomyModel example2() {
  const double alpha[5][10] = {
      {1, 1, 3, 0.1, 0.1, 1.2, 2, 1, 1, 0.7},
      {1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
      {9.9, 0.1, 5, 0.2, 6, 0.2, 8, 1, 1, 0.2},
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
      {1, 13, 11, 9, 4, 0.9, 8, 1, 2, 10},
  };
  const double endowment[5][10] = {
      {0.6, 0.2, 0.2, 20, 0.1, 2, 9, 5, 5, 15},
      {0.2, 11, 12, 13, 14, 15, 16, 5, 5, 9},
      {0.4, 9, 8, 7, 6, 5, 4, 5, 7, 12},
      {1, 5, 5, 5, 5, 5, 5, 8, 3, 17},
      {8, 1, 22, 10, 0.3, 0.9, 5.1, 0.1, 6.2, 11},
  };
  const double b[5] = {2, 1.3, 3, 0.2, 0.6};
  std::vector<Consumer> cs;
  for (int i = 0; i < 5; ++i) {
    cs.push_back(consumer(DemandFamily::ces_b, Eigen::Map<const Vector>(alpha[i], 10),
                          Eigen::Map<const Vector>(endowment[i], 10), b[i]));
  }
  return EconomyModel{
      "ex2",
      ExchangeEconomy(10, std::move(cs)),
      {{vec({0.187, 0.109, 0.099, 0.043, 0.117, 0.077, 0.117, 0.102, 0.099, 0.049}),
        std::nullopt, "p*"}}};
}

EconomyModel example3() {
  // Consumer 2 spends 10% of income on good 1. With a zero share there, none
  // of the listed equilibria clear the market for goods 1 and 2.
  std::vector<Consumer> cs{
      consumer(DemandFamily::cobb_douglas, vec({0.8, 0.2, 0, 0}), vec({0, 0, 10, 0})),
      consumer(DemandFamily::cobb_douglas, vec({0.1, 0.9, 0, 0}), vec({0, 0, 0, 20})),
  };
  Matrix A(4, 8);
  A << -1, 0, 0, 0, 3, 5, -1, -1,
       0, -1, 0, 0, -1, -1, 5, 5,
       0, 0, -1, 0, -1, -1, -1, -4,
       0, 0, 0, -1, -1, -4, -3, -1;
  return EconomyModel{
      "ex3",
      ProductionEconomy(ExchangeEconomy(4, std::move(cs)), A),
      {{vec({0.25, 0.25, 0.25, 0.25}), vec({0, 0, 0, 0, 5, 0, 5, 0}), "p1*"},
       {vec({0.2500, 0.2222, 0.3611, 0.1667}), vec({0, 0, 0, 0, 5.1806, 0.3611, 4.4583, 0}),
        "p2*"},
       {vec({0.2500, 0.2708, 0.1667, 0.1190}), vec({0, 0, 0, 0, 4.3690, 0, 5.1548, 0.1190}),
        "p3*"}}};
}

EconomyModel example4() {
  std::vector<Consumer> cs{
      consumer(DemandFamily::cobb_douglas, vec({0.9, 0.1, 0}), vec({0, 5, 3})),
  };
  Matrix A(3, 1);
  A << 1, -1, -1;
  return EconomyModel{"ex4",
                      ProductionEconomy(ExchangeEconomy(3, std::move(cs)), A),
                      {{vec({0.5000, 0.0833, 0.4167}), vec({3}), "p*"}}};
}

}  // namespace

std::vector<std::string> builtin_ids() { return {"ex1", "ex2", "ex3", "ex4"}; }

EconomyModel builtin_example(const std::string& id) {
  if (id == "ex1") return example1();
  if (id == "ex2") return example2();
  if (id == "ex3") return example3();
  if (id == "ex4") return example4();
  throw ModelError("unknown builtin example '" + id + "'");
}

}  // namespace eqtrace
