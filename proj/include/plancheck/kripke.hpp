#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plancheck/circuit.hpp"
#include "plancheck/smv.hpp"

namespace plancheck {

/// Full assignment to the state variables, one entry per variable in
/// declaration order: 0/1 for booleans, the literal's declaration index for
/// enums.
struct State {
  std::vector<std::uint32_t> values;
  friend auto operator<=>(const State&, const State&) = default;
};

struct StateVar {
  std::string name;
  std::vector<std::string> literals;  // empty for booleans
  unsigned width = 1;                 // bits; ceil(log2 |domain|) for enums
  unsigned first_bit = 0;

  bool is_boolean() const { return literals.empty(); }
  std::uint32_t domain_size() const { return is_boolean() ? 2U : static_cast<std::uint32_t>(literals.size()); }
};

/// Finite path s_0..s_k, optionally closed into a lasso by s_k -> s_{loop_back}.
struct Trace {
  std::vector<State> states;
  std::optional<std::size_t> loop_back;
  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Symbolic Kripke structure (S, S0, R, L) compiled from a model.
///
/// State bits are laid out variable by variable in declaration order. Enum
/// literals are numbered by declaration order and stored little-endian, so
/// bit j of a variable holds bit j of the literal index. Codes past the
/// domain are excluded by a domain constraint inside both predicates.
///
/// The circuit has 2 * bit_count() inputs: current-state bits first, then
/// next-state bits. init_pred() only reads the former.
class KripkeStructure {
 public:
  const std::vector<StateVar>& vars() const { return vars_; }
  std::size_t bit_count() const { return bit_count_; }
  const Circuit& circuit() const { return circuit_; }
  Signal init_pred() const { return init_; }
  Signal trans_pred() const { return trans_; }
  Signal domain_pred() const { return domain_; }
  /// Labeling: every boolean variable and every `var = literal` pair.
  const std::map<std::string, Signal>& atom_table() const { return atoms_; }
  const std::vector<std::string>& ap_names() const { return ap_names_; }
  const SmvModel& model() const { return model_; }

  std::optional<std::size_t> var_index(std::string_view name) const;
  bool is_valid(const State& s) const;
  std::vector<bool> encode(const State& s) const;
  /// Throws DecodeError when an enum field holds an excluded code.
  State decode(std::span<const bool> bits) const;

  /// Explicit evaluation of a boolean state expression.
  bool holds(const Expr& predicate, const State& s) const;
  bool init_holds(const State& s) const;
  bool trans_holds(const State& from, const State& to) const;

  /// Builds `predicate` inside `target` over the given current-state bits.
  Signal lower(const Expr& predicate, Circuit& target, std::span<const Signal> bits) const;

  std::string format_state(const State& s) const;

 private:
  friend KripkeStructure compile(const SmvModel& model);

  SmvModel model_;
  std::vector<StateVar> vars_;
  std::size_t bit_count_ = 0;
  Circuit circuit_;
  Signal init_;
  Signal trans_;
  Signal domain_;
  std::map<std::string, Signal> atoms_;
  std::vector<std::string> ap_names_;
};

/// Throws CompileError when the model has Error diagnostics or compares an
/// enum against a literal outside its domain.
KripkeStructure compile(const SmvModel& model);

/// All states satisfying the init assignments, sorted.
std::vector<State> initial_states(const KripkeStructure& k);

/// Every t with R(s, t), sorted. Throws InvalidState if s violates the domain.
std::vector<State> successors(const KripkeStructure& k, const State& s);

/// BFS fixpoint from S0; throws CapExceeded past `cap` states.
std::vector<State> enumerate_reachable(const KripkeStructure& k, std::size_t cap);

/// Executes a model with a unique initial state and unique successors.
Trace run_deterministic(const KripkeStructure& k, std::size_t steps);

/// Checks the trace against init_pred / trans_pred. On failure returns false
/// and, when `why` is given, a short explanation.
bool validate_trace(const KripkeStructure& k, const Trace& t, std::string* why = nullptr);

/// {"states": [{"var": value, ...}, ...], "loop_back": int|null}; booleans as
/// JSON booleans, enums as literal strings.
std::string trace_to_json(const KripkeStructure& k, const Trace& t);
Trace trace_from_json(const KripkeStructure& k, std::string_view json);

}  // namespace plancheck
