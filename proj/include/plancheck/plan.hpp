#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plancheck/bmc.hpp"
#include "plancheck/kripke.hpp"
#include "plancheck/smv.hpp"

namespace plancheck {

using Literals = std::map<std::string, bool>;

struct ActionSchema {
  Literals preconditions;
  Literals effects;
  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

enum class PlanLabel { Valid, Invalid };

/// Ground plan-validation instance. Fluents absent from `init` are false.
struct PlanProblem {
  std::string problem_id;
  std::vector<std::string> fluents;
  Literals init;  // after load: one entry per fluent
  std::map<std::string, ActionSchema> actions;  // "actions_catalog" in JSON
  std::vector<std::string> plan;
  Literals goal;
  std::optional<PlanLabel> label;
  std::optional<std::string> nl;

  bool initially(const std::string& fluent) const;
  friend bool operator==(const PlanProblem&, const PlanProblem&) = default;
};

/// Parses and validates one JSON document. Throws SchemaError naming the
/// offending field.
PlanProblem load_problem(std::string_view json);
/// Canonical single-line JSON; load_problem(emit_problem(p)) == p.
std::string emit_problem(const PlanProblem& p);
/// One problem per non-blank line. Errors are reported as "line N: field".
std::vector<PlanProblem> load_dataset(std::string_view jsonl);

struct PlanEncoding {
  SmvModel model;
  LtlFormula spec = LtlFormula::atom(Expr::boolean(true));
  /// Fluent name -> SMV identifier.
  std::map<std::string, std::string> fluent_vars;
};

/// Boolean VAR per fluent, `ok` latch, and a stage enum {s0..sN, done} where
/// stage s_i runs plan[i]. The spec is F(stage = done & ok & goal).
PlanEncoding encode_plan(const PlanProblem& p);

enum class VerdictKind { Valid, Invalid, UnknownParse, UnknownBound };

std::string to_string(VerdictKind kind);
VerdictKind verdict_kind_from_string(std::string_view s);

struct PlanVerdict {
  VerdictKind kind = VerdictKind::UnknownParse;
  std::optional<Trace> trace;
  /// Index of the first inapplicable action. simulate_plan uses plan.size()
  /// when every action applied but the goal does not hold.
  std::optional<std::size_t> failing_action;
  std::optional<ParseError> parse_error;  // set for UnknownParse
  /// Human-readable reason: parse error text, bound note, failed literal.
  std::string detail;
  std::vector<std::string> warnings;
  double wall_time = 0.0;  // seconds
};

/// Ground truth: executes the plan. The first action with an unmet
/// precondition makes the plan invalid.
PlanVerdict simulate_plan(const PlanProblem& p);

/// Model-checks `spec` on `model`: Holds -> Valid, counterexample -> Invalid,
/// bound exhausted -> UnknownBound, semantic or compile errors -> UnknownParse.
PlanVerdict verify_model(const SmvModel& model, const LtlFormula& spec, const CheckOptions& options = {});

/// encode_plan followed by verify_model. An Invalid verdict names the first
/// failing action when the trace shows `ok` dropping.
PlanVerdict verify_plan(const PlanProblem& p, const CheckOptions& options = {});

}  // namespace plancheck
