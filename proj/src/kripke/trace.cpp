#include <json.hpp>

#include "plancheck/kripke.hpp"

namespace plancheck {

std::string trace_to_json(const KripkeStructure& k, const Trace& t) {
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (const auto& s : t.states) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < k.vars().size(); ++i) {
      const StateVar& v = k.vars()[i];
      if (v.is_boolean()) {
        obj[v.name] = s.values.at(i) != 0;
      } else {
        obj[v.name] = v.literals.at(s.values.at(i));
      }
    }
    states.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["states"] = std::move(states);
  doc["loop_back"] = t.loop_back ? nlohmann::ordered_json(*t.loop_back) : nlohmann::ordered_json(nullptr);
  return doc.dump(2);
}

Trace trace_from_json(const KripkeStructure& k, std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("trace", e.what());
  }
  if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_array()) {
    throw SchemaError("states", "expected an array of states");
  }
  Trace t;
  for (const auto& obj : doc["states"]) {
    if (!obj.is_object()) throw SchemaError("states", "each state must be an object");
    State s;
    for (const auto& v : k.vars()) {
      if (!obj.contains(v.name)) throw SchemaError("states", "missing variable '" + v.name + "'");
      const auto& val = obj[v.name];
      if (v.is_boolean()) {
        if (!val.is_boolean()) throw SchemaError("states", "'" + v.name + "' must be a boolean");
        s.values.push_back(val.get<bool>() ? 1U : 0U);
      } else {
        if (!val.is_string()) throw SchemaError("states", "'" + v.name + "' must be a literal string");
        const auto lit = val.get<std::string>();
        auto it = std::find(v.literals.begin(), v.literals.end(), lit);
        if (it == v.literals.end()) throw SchemaError("states", "'" + lit + "' is not in the domain of " + v.name);
        s.values.push_back(static_cast<std::uint32_t>(it - v.literals.begin()));
      }
    }
    t.states.push_back(std::move(s));
  }
  if (doc.contains("loop_back") && !doc["loop_back"].is_null()) {
    if (!doc["loop_back"].is_number_unsigned()) throw SchemaError("loop_back", "expected a non-negative integer");
    t.loop_back = doc["loop_back"].get<std::size_t>();
  }
  return t;
}

}  // namespace plancheck
