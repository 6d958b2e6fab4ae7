#pragma once

#include "eqtrace/economy_models.hpp"

#include <cstdint>

namespace eqtrace {

struct SyntheticProductionSpec {
  Index goods = 10;
  Index activities = 30;
  int consumers = 4;
  Index active = 6;  // activities operated at the constructed equilibrium
  std::uint64_t seed = 1;
};

/// Random Cobb-Douglas production economy built around a chosen equilibrium:
/// prices p* and activity levels y* are drawn first, then the activity matrix
/// is shaped so that operated activities break even at p*, idle ones lose
/// money, and A y* equals the excess demand at p*. The constructed point is
/// attached as known equilibrium "constructed".
EconomyModel make_synthetic_production(const SyntheticProductionSpec& spec);

}  // namespace eqtrace
