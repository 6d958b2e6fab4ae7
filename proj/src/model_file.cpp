#include "eqtrace/model_file.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace eqtrace {

using nlohmann::json;

namespace {

json to_array(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ModelError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + (path.empty() ? "" : ".") + key + ": missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ModelError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ModelError(path + ": must be finite");
  return v;
}

Vector number_array(const json& j, Index expected, const std::string& path, bool nonnegative) {
  if (!j.is_array()) throw ModelError(path + ": expected an array");
  if (static_cast<Index>(j.size()) != expected) {
    throw ModelError(path + ": expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(j.size()));
  }
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    v[i] = number(j[static_cast<std::size_t>(i)], at);
    if (nonnegative && v[i] < 0.0) throw ModelError(at + ": must be nonnegative");
  }
  return v;
}

}  // namespace

json model_to_json(const EconomyModel& model) {
  const ExchangeEconomy& ex = model.exchange();
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = model.is_production() ? "production" : "exchange";
  doc["goods"] = ex.goods();
  json consumers = json::array();
  for (const auto& c : ex.consumers()) {
    json jc;
    jc["family"] = to_string(c.family);
    jc["shares"] = to_array(c.shares);
    if (c.family == DemandFamily::ces_b) jc["elasticity"] = c.elasticity;
    jc["endowment"] = to_array(c.endowment);
    consumers.push_back(std::move(jc));
  }
  doc["consumers"] = std::move(consumers);
  if (const auto* prod = std::get_if<ProductionEconomy>(&model.economy)) {
    json rows = json::array();
    const Matrix& A = prod->activity_matrix();
    for (Index r = 0; r < A.rows(); ++r) rows.push_back(to_array(A.row(r).transpose()));
    doc["activity_matrix"] = std::move(rows);
  }
  json known = json::array();
  for (const auto& k : model.known_equilibria) {
    json jk;
    jk["prices"] = to_array(k.prices);
    if (k.activities) jk["activities"] = to_array(*k.activities);
    jk["label"] = k.label;
    known.push_back(std::move(jk));
  }
  doc["known_equilibria"] = std::move(known);
  return doc;
}

EconomyModel model_from_json(const json& doc, const std::string& name) {
  if (!doc.is_object()) throw ModelError("document: expected a JSON object");
  const json& version = field(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ModelError("schema_version: unsupported (expected 1)");
  }
  const json& kind_j = field(doc, "kind", "");
  if (!kind_j.is_string()) throw ModelError("kind: expected a string");
  const std::string kind = kind_j.get<std::string>();
  if (kind != "exchange" && kind != "production") {
    throw ModelError("kind: must be \"exchange\" or \"production\"");
  }
  const json& goods_j = field(doc, "goods", "");
  if (!goods_j.is_number_integer() || goods_j.get<long long>() <= 0) {
    throw ModelError("goods: expected a positive integer");
  }
  const Index D = goods_j.get<Index>();

  const json& consumers_j = field(doc, "consumers", "");
  if (!consumers_j.is_array() || consumers_j.empty()) {
    throw ModelError("consumers: expected a nonempty array");
  }
  std::vector<Consumer> consumers;
  for (std::size_t i = 0; i < consumers_j.size(); ++i) {
    const std::string path = "consumers[" + std::to_string(i) + "]";
    const json& jc = consumers_j[i];
    Consumer c;
    const json& fam = field(jc, "family", path);
    const auto family = fam.is_string() ? parse_demand_family(fam.get<std::string>()) : std::nullopt;
    if (!family) {
      throw ModelError(join(path, "family") + ": must be \"ces-a\", \"ces-b\" or \"cobb-douglas\"");
    }
    c.family = *family;
    c.shares = number_array(field(jc, "shares", path), D, join(path, "shares"), true);
    c.endowment = number_array(field(jc, "endowment", path), D, join(path, "endowment"), true);
    if (auto it = jc.find("elasticity"); it != jc.end() && !it->is_null()) {
      c.elasticity = number(*it, join(path, "elasticity"));
    } else if (c.family == DemandFamily::ces_b) {
      throw ModelError(join(path, "elasticity") + ": required for family ces-b");
    }
    consumers.push_back(std::move(c));
  }
  ExchangeEconomy exchange(D, std::move(consumers));

  EconomyModel model{name, exchange, {}};
  Index J = 0;
  const auto am = doc.find("activity_matrix");
  const bool has_matrix = am != doc.end() && !am->is_null();
  if (kind == "production") {
    if (!has_matrix) throw ModelError("activity_matrix: required for kind production");
    if (!am->is_array() || static_cast<Index>(am->size()) != D) {
      throw ModelError("activity_matrix: expected " + std::to_string(D) + " rows");
    }
    const json& first = (*am)[0];
    if (!first.is_array() || first.empty()) {
      throw ModelError("activity_matrix[0]: expected a nonempty array");
    }
    J = static_cast<Index>(first.size());
    Matrix A(D, J);
    for (Index r = 0; r < D; ++r) {
      A.row(r) = number_array((*am)[static_cast<std::size_t>(r)], J,
                              "activity_matrix[" + std::to_string(r) + "]", false)
                     .transpose();
    }
    model.economy = ProductionEconomy(std::move(exchange), std::move(A));
  } else {
    if (has_matrix) throw ModelError("activity_matrix: not allowed for kind exchange");
    for (Index d = 0; d < D; ++d) {
      if (!(model.exchange().total_endowment()[d] > 0.0)) {
        throw ModelError("consumers: aggregate endowment of good " + std::to_string(d) +
                         " must be positive in an exchange economy");
      }
    }
  }

  if (auto kj = doc.find("known_equilibria"); kj != doc.end() && !kj->is_null()) {
    if (!kj->is_array()) throw ModelError("known_equilibria: expected an array");
    for (std::size_t i = 0; i < kj->size(); ++i) {
      const std::string path = "known_equilibria[" + std::to_string(i) + "]";
      const json& jk = (*kj)[i];
      KnownEquilibrium k;
      k.prices = number_array(field(jk, "prices", path), D, join(path, "prices"), true);
      if (auto ja = jk.find("activities"); ja != jk.end() && !ja->is_null()) {
        if (J == 0) throw ModelError(join(path, "activities") + ": only valid for production");
        k.activities = number_array(*ja, J, join(path, "activities"), true);
      }
      const json& label = field(jk, "label", path);
      if (!label.is_string()) throw ModelError(join(path, "label") + ": expected a string");
      k.label = label.get<std::string>();
      model.known_equilibria.push_back(std::move(k));
    }
  }
  return model;
}

EconomyModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("malformed JSON in '" + path + "': " + e.what());
  }
  return model_from_json(doc, std::filesystem::path(path).stem().string());
}

void save_model_file(const EconomyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
}

}  // namespace eqtrace
