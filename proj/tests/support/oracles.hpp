#pragma once

// Reference implementations used only by tests. They work directly on the
// syntax trees and explicit states, sharing no code paths with the library
// beyond the data types.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plancheck/kripke.hpp"
#include "plancheck/ltl.hpp"
#include "plancheck/sat.hpp"
#include "plancheck/smv.hpp"

namespace oracle {

using plancheck::Expr;
using plancheck::LtlFormula;
using plancheck::SmvModel;
using plancheck::State;
using plancheck::Trace;

/// Value of an expression: a boolean, or an enum literal name.
struct Value {
  bool is_bool = true;
  bool b = false;
  std::string lit;
  friend bool operator==(const Value&, const Value&) = default;
};

Value eval_expr(const SmvModel& m, const Expr& e, const State& s);
bool eval_bool(const SmvModel& m, const Expr& e, const State& s);

/// Every valid state in lexicographic order of per-variable values.
std::vector<State> all_states(const SmvModel& m);
bool is_initial(const SmvModel& m, const State& s);
bool is_transition(const SmvModel& m, const State& s, const State& t);
std::vector<State> successors(const SmvModel& m, const State& s);

/// Satisfying assignments by enumeration; model vectors indexed from 1.
std::optional<std::vector<bool>> brute_force_sat(const plancheck::CnfFormula& cnf);
std::size_t count_models(const plancheck::CnfFormula& cnf);

/// LTL on the infinite word of a lasso, by the textbook definition with
/// search windows wide enough to visit every distinct suffix.
bool lasso_holds(const SmvModel& m, const LtlFormula& f, const Trace& t, std::size_t pos = 0);

/// True when every infinite extension of the finite prefix satisfies f.
/// Sound approximation via strong / weak finite semantics.
bool prefix_forces(const SmvModel& m, const LtlFormula& f, const Trace& t);

/// Some execution of exactly bound + 1 states violates f, either closed
/// into a lasso by a real transition or as a prefix that forces !f.
bool violates_at_bound(const SmvModel& m, const LtlFormula& f, std::size_t bound);

/// Smallest bound b <= max_bound at which some execution of b+1 states
/// violates f, either as a lasso or as a prefix that forces !f.
std::optional<std::size_t> min_violation_bound(const SmvModel& m, const LtlFormula& f, std::size_t max_bound);

/// Number of executions with at most max_bound + 1 states, saturating at cap.
std::size_t count_paths(const SmvModel& m, std::size_t max_bound, std::size_t cap);

/// Number of states reachable from the initial states.
std::size_t count_reachable(const SmvModel& m);

/// Canonical text of a plan-problem document: fixed key order, closed-world
/// init spelled out, fluent maps in declaration order, actions by name.
std::string canonicalize_problem(const std::string& document);

}  // namespace oracle
