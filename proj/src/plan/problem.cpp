#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "plancheck/error.hpp"
#include "plancheck/plan.hpp"

namespace plancheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kKnownFields = {"problem_id", "fluents", "init", "actions_catalog",
                                            "plan",       "goal",    "label", "nl"};

const json& require(const json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) throw SchemaError(field, "missing");
  return *it;
}

Literals read_literals(const json& j, const std::string& field, const std::set<std::string>& declared) {
  if (!j.is_object()) throw SchemaError(field, "expected an object of fluent -> boolean");
  Literals out;
  for (const auto& [name, value] : j.items()) {
    if (!declared.count(name)) throw SchemaError(field, "undeclared fluent '" + name + "'");
    if (!value.is_boolean()) throw SchemaError(field, "value of '" + name + "' must be a boolean");
    out[name] = value.get<bool>();
  }
  return out;
}

ordered_json write_literals(const Literals& l, const std::vector<std::string>& order) {
  ordered_json out = ordered_json::object();
  for (const auto& f : order) {
    const auto it = l.find(f);
    if (it != l.end()) out[f] = it->second;
  }
  return out;
}

}  // namespace

bool PlanProblem::initially(const std::string& fluent) const {
  const auto it = init.find(fluent);
  return it != init.end() && it->second;
}

PlanProblem load_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("document", "expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKnownFields.count(key)) throw SchemaError(key, "unknown field");
  }

  PlanProblem p;
  const auto& id = require(doc, "problem_id");
  if (!id.is_string() || id.get<std::string>().empty()) throw SchemaError("problem_id", "expected a non-empty string");
  p.problem_id = id.get<std::string>();

  const auto& fluents = require(doc, "fluents");
  if (!fluents.is_array()) throw SchemaError("fluents", "expected an array of names");
  std::set<std::string> declared;
  for (const auto& f : fluents) {
    if (!f.is_string() || f.get<std::string>().empty()) throw SchemaError("fluents", "expected non-empty strings");
    if (!declared.insert(f.get<std::string>()).second) {
      throw SchemaError("fluents", "duplicate fluent '" + f.get<std::string>() + "'");
    }
    p.fluents.push_back(f.get<std::string>());
  }

  // Closed world: every declared fluent gets an explicit initial value.
  Literals given;
  if (doc.contains("init")) given = read_literals(doc["init"], "init", declared);
  for (const auto& f : p.fluents) p.init[f] = given.count(f) ? given[f] : false;

  const auto& catalog = require(doc, "actions_catalog");
  if (!catalog.is_object()) throw SchemaError("actions_catalog", "expected an object of action name -> schema");
  for (const auto& [name, body] : catalog.items()) {
    const std::string field = "actions_catalog." + name;
    if (name.empty()) throw SchemaError("actions_catalog", "empty action name");
    if (!body.is_object()) throw SchemaError(field, "expected an object");
    for (const auto& [key, _] : body.items()) {
      if (key != "preconditions" && key != "effects") throw SchemaError(field + "." + key, "unknown field");
    }
    ActionSchema a;
    if (body.contains("preconditions")) {
      a.preconditions = read_literals(body["preconditions"], field + ".preconditions", declared);
    }
    if (body.contains("effects")) a.effects = read_literals(body["effects"], field + ".effects", declared);
    p.actions.emplace(name, std::move(a));
  }

  const auto& plan = require(doc, "plan");
  if (!plan.is_array()) throw SchemaError("plan", "expected an array of action names");
  for (const auto& step : plan) {
    if (!step.is_string()) throw SchemaError("plan", "expected action names");
    const auto name = step.get<std::string>();
    if (!p.actions.count(name)) throw SchemaError("plan", "unknown action '" + name + "'");
    p.plan.push_back(name);
  }

  p.goal = read_literals(require(doc, "goal"), "goal", declared);
  if (p.goal.empty()) throw SchemaError("goal", "must name at least one fluent");

  if (doc.contains("label")) {
    const auto& l = doc["label"];
    if (l == "valid") {
      p.label = PlanLabel::Valid;
    } else if (l == "invalid") {
      p.label = PlanLabel::Invalid;
    } else {
      throw SchemaError("label", "expected \"valid\" or \"invalid\"");
    }
  }
  if (doc.contains("nl")) {
    if (!doc["nl"].is_string()) throw SchemaError("nl", "expected a string");
    p.nl = doc["nl"].get<std::string>();
  }
  return p;
}

std::string emit_problem(const PlanProblem& p) {
  ordered_json doc;
  doc["problem_id"] = p.problem_id;
  doc["fluents"] = p.fluents;
  ordered_json init = ordered_json::object();
  for (const auto& f : p.fluents) init[f] = p.initially(f);
  doc["init"] = init;
  ordered_json catalog = ordered_json::object();
  for (const auto& [name, a] : p.actions) {
    catalog[name] = {{"preconditions", write_literals(a.preconditions, p.fluents)},
                     {"effects", write_literals(a.effects, p.fluents)}};
  }
  doc["actions_catalog"] = catalog;
  doc["plan"] = p.plan;
  doc["goal"] = write_literals(p.goal, p.fluents);
  if (p.label) doc["label"] = *p.label == PlanLabel::Valid ? "valid" : "invalid";
  if (p.nl) doc["nl"] = *p.nl;
  return doc.dump();
}

std::vector<PlanProblem> load_dataset(std::string_view jsonl) {
  std::vector<PlanProblem> out;
  std::size_t line_no = 0;
  while (!jsonl.empty()) {
    ++line_no;
    const auto nl = jsonl.find('\n');
    std::string_view line = jsonl.substr(0, nl);
    jsonl = nl == std::string_view::npos ? std::string_view{} : jsonl.substr(nl + 1);
    if (std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
      continue;
    }
    try {
      out.push_back(load_problem(line));
    } catch (const SchemaError& e) {
      const std::string what = e.what();
      const auto detail = e.field().empty() ? what : what.substr(e.field().size() + 2);
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.field(), detail);
    }
  }
  return out;
}

}  // namespace plancheck
