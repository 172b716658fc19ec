#include <cctype>
#include <chrono>
#include <regex>
#include <set>

#include "plancheck/error.hpp"
#include "plancheck/plan.hpp"

namespace plancheck {

namespace {

const std::set<std::string> kTaken = {"MODULE", "main", "VAR", "ASSIGN", "LTLSPEC", "init", "next", "case", "esac",
                                      "boolean", "TRUE", "FALSE", "X", "F", "G", "U", "stage", "ok", "done"};

bool is_stage_literal(const std::string& s) { return std::regex_match(s, std::regex("s[0-9]+")); }

// Maps fluent names onto distinct identifiers that cannot clash with the
// keywords, the bookkeeping variables, or the stage literals.
std::map<std::string, std::string> assign_identifiers(const std::vector<std::string>& fluents) {
  std::map<std::string, std::string> out;
  std::set<std::string> used;
  for (const auto& f : fluents) {
    std::string id;
    for (char c : f) id += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
    if (std::isdigit(static_cast<unsigned char>(id[0])) || kTaken.count(id) || is_stage_literal(id)) id = "f_" + id;
    std::string candidate = id;
    for (int n = 2; used.count(candidate); ++n) candidate = id + "_" + std::to_string(n);
    used.insert(candidate);
    out[f] = candidate;
  }
  return out;
}

std::string stage_name(std::size_t i) { return "s" + std::to_string(i); }

Expr at_stage(const std::string& lit) { return Expr::equals(Expr::var("stage"), Expr::enum_literal(lit)); }

Expr literal(const std::string& var, bool value) { return value ? Expr::var(var) : Expr::negate(Expr::var(var)); }

Expr preconditions_of(const ActionSchema& a, const std::map<std::string, std::string>& ids) {
  std::vector<Expr> terms;
  for (const auto& [f, v] : a.preconditions) terms.push_back(literal(ids.at(f), v));
  return conj_all(terms);
}

Expr guard_of(const ActionSchema& a, std::size_t step, const std::map<std::string, std::string>& ids) {
  const Expr here = at_stage(stage_name(step));
  return a.preconditions.empty() ? here : Expr::conj(here, preconditions_of(a, ids));
}

// Holds when some precondition of `a` is violated.
Expr violated_by(const ActionSchema& a, const std::map<std::string, std::string>& ids) {
  std::vector<Expr> terms;
  for (const auto& [f, v] : a.preconditions) terms.push_back(literal(ids.at(f), !v));
  return disj_all(terms);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PlanEncoding encode_plan(const PlanProblem& p) {
  PlanEncoding enc;
  enc.fluent_vars = assign_identifiers(p.fluents);
  const auto& ids = enc.fluent_vars;
  SmvModel& m = enc.model;
  const std::size_t n = p.plan.size();

  VarDecl stage{"stage", {}, {}};
  for (std::size_t i = 0; i <= n; ++i) stage.literals.push_back(stage_name(i));
  stage.literals.push_back("done");
  m.vars.push_back(stage);
  m.vars.push_back(VarDecl{"ok", {}, {}});
  for (const auto& f : p.fluents) m.vars.push_back(VarDecl{ids.at(f), {}, {}});

  m.inits.insert_or_assign("stage", Expr::enum_literal("s0"));
  m.inits.insert_or_assign("ok", Expr::boolean(true));
  for (const auto& f : p.fluents) m.inits.insert_or_assign(ids.at(f), Expr::boolean(p.initially(f)));

  std::vector<CaseBranch> stage_next;
  for (std::size_t i = 0; i < n; ++i) stage_next.push_back({at_stage(stage_name(i)), Expr::enum_literal(stage_name(i + 1))});
  stage_next.push_back({Expr::boolean(true), Expr::enum_literal("done")});
  m.nexts.insert_or_assign("stage", Expr::case_of(std::move(stage_next)));

  // ok drops at the first stage whose preconditions fail and never recovers.
  std::vector<CaseBranch> ok_next;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = p.actions.at(p.plan[i]);
    if (a.preconditions.empty()) continue;
    ok_next.push_back(
        {Expr::conj(at_stage(stage_name(i)), violated_by(a, ids)), Expr::boolean(false)});
  }
  if (ok_next.empty()) {
    m.nexts.insert_or_assign("ok", Expr::var("ok"));
  } else {
    ok_next.push_back({Expr::boolean(true), Expr::var("ok")});
    m.nexts.insert_or_assign("ok", Expr::case_of(std::move(ok_next)));
  }

  for (const auto& f : p.fluents) {
    const auto& id = ids.at(f);
    std::vector<CaseBranch> branches;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = p.actions.at(p.plan[i]);
      const auto it = a.effects.find(f);
      if (it != a.effects.end()) branches.push_back({guard_of(a, i, ids), Expr::boolean(it->second)});
    }
    if (branches.empty()) {
      m.nexts.insert_or_assign(id, Expr::var(id));
    } else {
      branches.push_back({Expr::boolean(true), Expr::var(id)});
      m.nexts.insert_or_assign(id, Expr::case_of(std::move(branches)));
    }
  }

  LtlFormula target = LtlFormula::conj(LtlFormula::atom(at_stage("done")), LtlFormula::atom(Expr::var("ok")));
  for (const auto& [f, v] : p.goal) {
    const auto a = LtlFormula::atom(Expr::var(ids.at(f)));
    target = LtlFormula::conj(target, v ? a : LtlFormula::negate(a));
  }
  enc.spec = LtlFormula::finally(target);
  m.ltlspecs.push_back(enc.spec);
  return enc;
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Valid:
      return "valid";
    case VerdictKind::Invalid:
      return "invalid";
    case VerdictKind::UnknownParse:
      return "unknown_parse";
    case VerdictKind::UnknownBound:
      return "unknown_bound";
  }
  return "unknown_parse";
}

VerdictKind verdict_kind_from_string(std::string_view s) {
  for (auto k : {VerdictKind::Valid, VerdictKind::Invalid, VerdictKind::UnknownParse, VerdictKind::UnknownBound}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

PlanVerdict simulate_plan(const PlanProblem& p) {
  const auto start = std::chrono::steady_clock::now();
  PlanVerdict v;
  Literals state = p.init;
  for (std::size_t i = 0; i < p.plan.size(); ++i) {
    const auto& a = p.actions.at(p.plan[i]);
    for (const auto& [f, want] : a.preconditions) {
      if (state[f] != want) {
        v.kind = VerdictKind::Invalid;
        v.failing_action = i;
        v.detail = "action " + std::to_string(i) + " (" + p.plan[i] + ") needs " + (want ? "" : "!") + f;
        v.wall_time = seconds_since(start);
        return v;
      }
    }
    for (const auto& [f, value] : a.effects) state[f] = value;
  }
  v.kind = VerdictKind::Valid;
  for (const auto& [f, want] : p.goal) {
    if (state[f] != want) {
      v.kind = VerdictKind::Invalid;
      v.failing_action = p.plan.size();
      v.detail = std::string("goal literal ") + (want ? "" : "!") + f + " does not hold";
      break;
    }
  }
  v.wall_time = seconds_since(start);
  return v;
}

PlanVerdict verify_model(const SmvModel& model, const LtlFormula& spec, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PlanVerdict v;
  auto unknown_parse = [&](const ParseError& e) {
    v.kind = VerdictKind::UnknownParse;
    v.parse_error = e;
    v.detail = e.what();
    v.wall_time = seconds_since(start);
    return v;
  };

  std::optional<KripkeStructure> k;
  LtlFormula phi = spec;
  try {
    for (const auto& d : check_semantics(model)) {
      if (d.severity == Severity::Error) throw ParseError(d.message, d.pos);
      v.warnings.push_back(d.message);
    }
    phi = resolve_ltl(spec, model);
    k.emplace(compile(model));
  } catch (const ParseError& e) {
    return unknown_parse(e);
  } catch (const CompileError& e) {
    return unknown_parse(ParseError(e.what(), {}));
  }

  const auto outcome = check_spec(*k, phi, options);
  v.detail = describe(outcome);
  switch (outcome.status) {
    case CheckStatus::Holds:
      v.kind = VerdictKind::Valid;
      if (outcome.vacuous) v.warnings.push_back("no initial state; the spec holds vacuously");
      break;
    case CheckStatus::CounterexampleFound:
      v.kind = VerdictKind::Invalid;
      v.trace = outcome.trace;
      break;
    case CheckStatus::BoundExhausted:
      v.kind = VerdictKind::UnknownBound;
      break;
  }
  v.wall_time = seconds_since(start);
  return v;
}

PlanVerdict verify_plan(const PlanProblem& p, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto enc = encode_plan(p);
  auto v = verify_model(enc.model, enc.spec, options);
  if (v.kind == VerdictKind::Invalid && v.trace) {
    // Stage s_i with ok followed by !ok means plan[i] was inapplicable.
    const auto& states = v.trace->states;
    for (std::size_t j = 0; j + 1 < states.size(); ++j) {
      if (states[j].values[1] == 1 && states[j + 1].values[1] == 0) {
        v.failing_action = states[j].values[0];
        break;
      }
    }
  }
  v.wall_time = seconds_since(start);
  return v;
}

}  // namespace plancheck
