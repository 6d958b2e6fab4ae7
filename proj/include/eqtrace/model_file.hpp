#pragma once

// JSON model files (schema_version 1):
//
//   {
//     "schema_version": 1,
//     "kind": "exchange" | "production",
//     "goods": D,
//     "consumers": [ { "family": "ces-a" | "ces-b" | "cobb-douglas",
//                      "shares": [D], "elasticity": b, "endowment": [D] } ],
//     "activity_matrix": [[J] x D],              // production only
//     "known_equilibria": [ { "prices": [D], "activities": [J], "label": "..." } ]
//   }

#include "eqtrace/economy_models.hpp"

#include "json.hpp"

#include <string>

namespace eqtrace {

nlohmann::json model_to_json(const EconomyModel& model);

/// Throws ModelError whose message starts with the offending field path,
/// e.g. "consumers[1].endowment[2]: must be finite and nonnegative".
EconomyModel model_from_json(const nlohmann::json& doc, const std::string& name = "model");

EconomyModel load_model_file(const std::string& path);
void save_model_file(const EconomyModel& model, const std::string& path);

}  // namespace eqtrace
