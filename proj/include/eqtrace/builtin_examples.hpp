#pragma once

#include "eqtrace/economy_models.hpp"

#include <string>
#include <vector>

namespace eqtrace {

/// Ids accepted by builtin_example: "ex1" .. "ex4".
std::vector<std::string> builtin_ids();

/// Fully parameterized benchmark economy with its reference equilibria
/// attached. Throws ModelError for an unknown id.
///
///   ex1  2 goods, 2 CES-A consumers, three equilibria
///   ex2  10 goods, 5 CES-B consumers
///   ex3  4 goods, 2 Cobb-Douglas consumers, 8 activities, three equilibria
///   ex4  3 goods, 1 Cobb-Douglas consumer, 1 activity
EconomyModel builtin_example(const std::string& id);

}  // namespace eqtrace
