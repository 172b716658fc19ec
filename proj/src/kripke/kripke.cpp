#include "plancheck/kripke.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace plancheck {

namespace {

unsigned bits_for(std::size_t domain) {
  unsigned w = 0;
  while ((std::size_t{1} << w) < domain) ++w;
  return w;
}

// A lowered value: a single signal for booleans, or one selector signal per
// possible enum literal ("this expression currently equals literal l").
struct Lowered {
  bool is_bool = true;
  Signal boolean;
  std::map<std::string, Signal> onehot;
};

class Lowerer {
 public:
  Lowerer(const KripkeStructure& k, Circuit& c, std::span<const Signal> bits) : k_(k), c_(c), bits_(bits) {}

  Lowered lower(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::BoolConst:
        return {true, Circuit::constant(e.bool_value()), {}};
      case ExprKind::EnumConst:
        return {false, {}, {{e.name(), Circuit::kTrue}}};
      case ExprKind::VarRef:
        return var(e);
      case ExprKind::Not:
        return {true, !boolean(e.operand()), {}};
      case ExprKind::And:
        return {true, c_.land(boolean(e.lhs()), boolean(e.rhs())), {}};
      case ExprKind::Or:
        return {true, c_.lor(boolean(e.lhs()), boolean(e.rhs())), {}};
      case ExprKind::Eq:
        return {true, equality(e), {}};
      case ExprKind::Case:
        return case_of(e);
    }
    throw CompileError("malformed expression");
  }

  Signal boolean(const Expr& e) {
    Lowered v = lower(e);
    if (!v.is_bool) throw CompileError("expected a boolean expression: " + to_string(e));
    return v.boolean;
  }

  /// Signal asserting that variable `var` (given its own bits) equals `value`.
  Signal assign(const StateVar& var, std::span<const Signal> var_bits, const Expr& value) {
    Lowered v = lower(value);
    if (var.is_boolean()) {
      if (!v.is_bool) throw CompileError("enum value assigned to boolean '" + var.name + "'");
      return c_.iff(var_bits[0], v.boolean);
    }
    if (v.is_bool) throw CompileError("boolean value assigned to enum '" + var.name + "'");
    for (const auto& [lit, sel] : v.onehot) {
      if (std::find(var.literals.begin(), var.literals.end(), lit) == var.literals.end()) {
        throw CompileError("literal '" + lit + "' is outside the domain of '" + var.name + "'");
      }
    }
    std::vector<Signal> parts;
    for (unsigned j = 0; j < var.width; ++j) {
      std::vector<Signal> ones;
      for (std::size_t code = 0; code < var.literals.size(); ++code) {
        if ((code >> j) & 1U) {
          auto it = v.onehot.find(var.literals[code]);
          if (it != v.onehot.end()) ones.push_back(it->second);
        }
      }
      parts.push_back(c_.iff(var_bits[j], c_.disj(ones)));
    }
    return c_.conj(parts);
  }

 private:
  Lowered var(const Expr& e) {
    const auto idx = k_.var_index(e.name());
    if (!idx) throw CompileError("undeclared variable " + e.name());
    const StateVar& v = k_.vars()[*idx];
    auto vb = bits_.subspan(v.first_bit, v.width);
    if (v.is_boolean()) return {true, vb[0], {}};
    Lowered out{false, {}, {}};
    for (std::size_t code = 0; code < v.literals.size(); ++code) {
      std::vector<Signal> match;
      for (unsigned j = 0; j < v.width; ++j) match.push_back(((code >> j) & 1U) ? vb[j] : !vb[j]);
      out.onehot.emplace(v.literals[code], c_.conj(match));
    }
    return out;
  }

  Signal equality(const Expr& e) {
    Lowered a = lower(e.lhs());
    Lowered b = lower(e.rhs());
    if (a.is_bool != b.is_bool) throw CompileError("type mismatch in comparison: " + to_string(e));
    if (a.is_bool) return c_.iff(a.boolean, b.boolean);
    check_literal_domain(e.lhs(), e.rhs());
    check_literal_domain(e.rhs(), e.lhs());
    std::vector<Signal> same;
    for (const auto& [lit, sel] : a.onehot) {
      if (auto it = b.onehot.find(lit); it != b.onehot.end()) same.push_back(c_.land(sel, it->second));
    }
    return c_.disj(same);
  }

  void check_literal_domain(const Expr& lit, const Expr& other) {
    if (lit.kind() != ExprKind::EnumConst || other.kind() != ExprKind::VarRef) return;
    const auto idx = k_.var_index(other.name());
    if (!idx) return;
    const StateVar& v = k_.vars()[*idx];
    if (std::find(v.literals.begin(), v.literals.end(), lit.name()) == v.literals.end()) {
      throw CompileError("literal '" + lit.name() + "' is outside the domain of '" + v.name + "'");
    }
  }

  Lowered case_of(const Expr& e) {
    Signal none_before = Circuit::kTrue;
    Lowered out;
    bool first = true;
    for (const auto& b : e.branches()) {
      const Signal guard = boolean(b.guard);
      const Signal fires = c_.land(none_before, guard);
      none_before = c_.land(none_before, !guard);
      Lowered v = lower(b.value);
      if (first) {
        out.is_bool = v.is_bool;
        out.boolean = Circuit::kFalse;
        first = false;
      } else if (v.is_bool != out.is_bool) {
        throw CompileError("case branches mix boolean and enum values");
      }
      if (v.is_bool) {
        out.boolean = c_.lor(out.boolean, c_.land(fires, v.boolean));
      } else {
        for (const auto& [lit, sel] : v.onehot) {
          auto [it, inserted] = out.onehot.emplace(lit, Circuit::kFalse);
          it->second = c_.lor(it->second, c_.land(fires, sel));
        }
      }
    }
    if (none_before != Circuit::kFalse) throw CompileError("case not total: final branch guard must be TRUE");
    return out;
  }

  const KripkeStructure& k_;
  Circuit& c_;
  std::span<const Signal> bits_;
};

// Explicit interpreter over decoded states; independent of the circuit.
struct Value {
  bool is_bool = true;
  bool b = false;
  const std::string* lit = nullptr;
};

class Interpreter {
 public:
  Interpreter(const KripkeStructure& k, const State& s) : k_(k), s_(s) {}

  Value eval(const Expr& e) const {
    switch (e.kind()) {
      case ExprKind::BoolConst:
        return {true, e.bool_value(), nullptr};
      case ExprKind::EnumConst:
        return {false, false, &e.name()};
      case ExprKind::VarRef: {
        const auto idx = k_.var_index(e.name());
        if (!idx) throw std::logic_error("undeclared variable " + e.name());
        const StateVar& v = k_.vars()[*idx];
        const std::uint32_t code = s_.values[*idx];
        if (v.is_boolean()) return {true, code != 0, nullptr};
        return {false, false, &v.literals[code]};
      }
      case ExprKind::Not:
        return {true, !truth(e.operand()), nullptr};
      case ExprKind::And:
        return {true, truth(e.lhs()) && truth(e.rhs()), nullptr};
      case ExprKind::Or:
        return {true, truth(e.lhs()) || truth(e.rhs()), nullptr};
      case ExprKind::Eq: {
        const Value a = eval(e.lhs());
        const Value b = eval(e.rhs());
        return {true, a.is_bool ? a.b == b.b : *a.lit == *b.lit, nullptr};
      }
      case ExprKind::Case:
        for (const auto& br : e.branches()) {
          if (truth(br.guard)) return eval(br.value);
        }
        throw std::logic_error("no case branch applies");
    }
    throw std::logic_error("malformed expression");
  }

  bool truth(const Expr& e) const { return eval(e).b; }

  std::uint32_t code_for(const StateVar& var, const Expr& e) const {
    const Value v = eval(e);
    if (var.is_boolean()) return v.b ? 1U : 0U;
    auto it = std::find(var.literals.begin(), var.literals.end(), *v.lit);
    if (it == var.literals.end()) throw InvalidState("value outside the domain of '" + var.name + "'");
    return static_cast<std::uint32_t>(it - var.literals.begin());
  }

 private:
  const KripkeStructure& k_;
  const State& s_;
};

void require_valid(const KripkeStructure& k, const State& s) {
  if (!k.is_valid(s)) throw InvalidState("state violates the domain constraints: " + k.format_state(s));
}

}  // namespace

std::optional<std::size_t> KripkeStructure::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

bool KripkeStructure::is_valid(const State& s) const {
  if (s.values.size() != vars_.size()) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (s.values[i] >= vars_[i].domain_size()) return false;
  }
  return true;
}

std::vector<bool> KripkeStructure::encode(const State& s) const {
  std::vector<bool> bits(bit_count_, false);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    for (unsigned j = 0; j < vars_[i].width; ++j) bits[vars_[i].first_bit + j] = (s.values[i] >> j) & 1U;
  }
  return bits;
}

State KripkeStructure::decode(std::span<const bool> bits) const {
  State s;
  for (const auto& v : vars_) {
    std::uint32_t code = 0;
    for (unsigned j = 0; j < v.width; ++j) code |= static_cast<std::uint32_t>(bits[v.first_bit + j]) << j;
    if (code >= v.domain_size()) {
      throw DecodeError("excluded code " + std::to_string(code) + " for '" + v.name + "'");
    }
    s.values.push_back(code);
  }
  return s;
}

bool KripkeStructure::holds(const Expr& predicate, const State& s) const {
  require_valid(*this, s);
  return Interpreter(*this, s).truth(predicate);
}

bool KripkeStructure::init_holds(const State& s) const {
  if (!is_valid(s)) return false;
  std::vector<bool> bits = encode(s);
  bits.resize(2 * bit_count_, false);
  return circuit_.evaluate(init_, bits);
}

bool KripkeStructure::trans_holds(const State& from, const State& to) const {
  if (!is_valid(from) || !is_valid(to)) return false;
  std::vector<bool> bits = encode(from);
  const std::vector<bool> next = encode(to);
  bits.insert(bits.end(), next.begin(), next.end());
  return circuit_.evaluate(trans_, bits);
}

Signal KripkeStructure::lower(const Expr& predicate, Circuit& target, std::span<const Signal> bits) const {
  return Lowerer(*this, target, bits).boolean(predicate);
}

std::string KripkeStructure::format_state(const State& s) const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < vars_.size() && i < s.values.size(); ++i) {
    os << (i ? ", " : "") << vars_[i].name << '=';
    if (vars_[i].is_boolean()) {
      os << (s.values[i] ? "TRUE" : "FALSE");
    } else if (s.values[i] < vars_[i].literals.size()) {
      os << vars_[i].literals[s.values[i]];
    } else {
      os << '#' << s.values[i];
    }
  }
  os << '}';
  return os.str();
}

KripkeStructure compile(const SmvModel& model) {
  for (const auto& d : check_semantics(model)) {
    if (d.severity == Severity::Error) throw CompileError(d.message);
  }

  KripkeStructure k;
  k.model_ = model;
  for (const auto& v : model.vars) {
    StateVar sv{v.name, v.literals, v.is_boolean() ? 1U : bits_for(v.literals.size()),
                static_cast<unsigned>(k.bit_count_)};
    k.bit_count_ += sv.width;
    k.vars_.push_back(std::move(sv));
  }

  Circuit& c = k.circuit_;
  std::vector<Signal> cur;
  std::vector<Signal> nxt;
  for (std::size_t i = 0; i < k.bit_count_; ++i) cur.push_back(c.add_input());
  for (std::size_t i = 0; i < k.bit_count_; ++i) nxt.push_back(c.add_input());

  auto domain = [&](std::span<const Signal> bits) {
    std::vector<Signal> ok;
    for (const auto& v : k.vars_) {
      if (v.is_boolean()) continue;
      for (std::uint32_t code = v.domain_size(); code < (1U << v.width); ++code) {
        std::vector<Signal> match;
        for (unsigned j = 0; j < v.width; ++j) {
          const Signal b = bits[v.first_bit + j];
          match.push_back(((code >> j) & 1U) ? b : !b);
        }
        ok.push_back(!c.conj(match));
      }
    }
    return c.conj(ok);
  };

  Lowerer at_cur(k, c, cur);
  k.domain_ = domain(cur);
  std::vector<Signal> init_parts{k.domain_};
  std::vector<Signal> trans_parts{k.domain_, domain(nxt)};
  for (const auto& v : k.vars_) {
    if (auto it = model.inits.find(v.name); it != model.inits.end()) {
      init_parts.push_back(at_cur.assign(v, std::span<const Signal>(cur).subspan(v.first_bit, v.width), it->second));
    }
    if (auto it = model.nexts.find(v.name); it != model.nexts.end()) {
      trans_parts.push_back(at_cur.assign(v, std::span<const Signal>(nxt).subspan(v.first_bit, v.width), it->second));
    }
  }
  k.init_ = c.conj(init_parts);
  k.trans_ = c.conj(trans_parts);

  for (const auto& v : k.vars_) {
    if (v.is_boolean()) {
      k.atoms_.emplace(v.name, cur[v.first_bit]);
      k.ap_names_.push_back(v.name);
      continue;
    }
    for (const auto& lit : v.literals) {
      const std::string name = v.name + "=" + lit;
      k.atoms_.emplace(name, at_cur.boolean(Expr::equals(Expr::var(v.name), Expr::enum_literal(lit))));
      k.ap_names_.push_back(name);
    }
  }

  // Typing already rejects out-of-domain comparisons; lowering every spec
  // atom once surfaces hand-built models that bypassed the parser.
  for (const auto& spec : model.ltlspecs) {
    std::vector<LtlFormula> todo{spec};
    while (!todo.empty()) {
      LtlFormula f = todo.back();
      todo.pop_back();
      if (f.kind() == LtlKind::Atom) {
        Circuit scratch;
        std::vector<Signal> bits;
        for (std::size_t i = 0; i < k.bit_count_; ++i) bits.push_back(scratch.add_input());
        k.lower(f.predicate(), scratch, bits);
      } else if (f.kind() == LtlKind::And || f.kind() == LtlKind::Or || f.kind() == LtlKind::Until) {
        todo.push_back(f.lhs());
        todo.push_back(f.rhs());
      } else {
        todo.push_back(f.operand());
      }
    }
  }
  return k;
}

std::vector<State> initial_states(const KripkeStructure& k) {
  const auto& vars = k.vars();
  const SmvModel& m = k.model();
  // An init constraint is checked as soon as every variable it mentions
  // (including its target) has a value.
  std::vector<std::vector<std::pair<std::size_t, const Expr*>>> checks(vars.size());
  for (const auto& [name, expr] : m.inits) {
    std::size_t last = *k.var_index(name);
    for (const auto& dep : referenced_vars(expr)) last = std::max(last, *k.var_index(dep));
    checks[last].emplace_back(*k.var_index(name), &expr);
  }

  std::vector<State> out;
  if (vars.empty()) {
    out.push_back(State{});
    return out;
  }
  State s{std::vector<std::uint32_t>(vars.size(), 0)};
  auto consistent = [&](std::size_t depth) {
    Interpreter in(k, s);
    for (const auto& [target, expr] : checks[depth]) {
      if (in.code_for(vars[target], *expr) != s.values[target]) return false;
    }
    return true;
  };
  std::function<void(std::size_t)> search = [&](std::size_t depth) {
    for (std::uint32_t v = 0; v < vars[depth].domain_size(); ++v) {
      s.values[depth] = v;
      if (!consistent(depth)) continue;
      if (depth + 1 == vars.size()) {
        out.push_back(s);
      } else {
        search(depth + 1);
      }
    }
    s.values[depth] = 0;
  };
  search(0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<State> successors(const KripkeStructure& k, const State& s) {
  require_valid(k, s);
  const auto& vars = k.vars();
  Interpreter in(k, s);
  // Per variable: the forced next value, or every domain value when unassigned.
  std::vector<std::vector<std::uint32_t>> choices(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (auto it = k.model().nexts.find(vars[i].name); it != k.model().nexts.end()) {
      choices[i].push_back(in.code_for(vars[i], it->second));
    } else {
      for (std::uint32_t v = 0; v < vars[i].domain_size(); ++v) choices[i].push_back(v);
    }
  }
  std::vector<State> out{State{}};
  for (const auto& options : choices) {
    std::vector<State> grown;
    for (const auto& partial : out) {
      for (auto v : options) {
        State t = partial;
        t.values.push_back(v);
        grown.push_back(std::move(t));
      }
    }
    out = std::move(grown);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<State> enumerate_reachable(const KripkeStructure& k, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("reachability cap must be at least 1");
  std::set<State> seen;
  std::deque<State> frontier;
  for (auto& s : initial_states(k)) {
    if (seen.insert(s).second) {
      if (seen.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " reachable states");
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const State s = std::move(frontier.front());
    frontier.pop_front();
    const auto next = successors(k, s);
    if (next.empty()) throw std::logic_error("transition relation is not total at " + k.format_state(s));
    for (const auto& t : next) {
      if (seen.insert(t).second) {
        if (seen.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " reachable states");
        frontier.push_back(t);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

Trace run_deterministic(const KripkeStructure& k, std::size_t steps) {
  auto unassigned = [&](const std::map<std::string, Expr>& assigns) {
    std::string names;
    for (const auto& v : k.vars()) {
      if (!assigns.count(v.name)) names += (names.empty() ? "" : ", ") + v.name;
    }
    return names;
  };

  const auto inits = initial_states(k);
  if (inits.size() != 1) {
    std::string msg = "expected exactly one initial state, found " + std::to_string(inits.size());
    if (const auto free = unassigned(k.model().inits); !free.empty()) msg += " (no init for " + free + ")";
    throw NondeterminismError(msg);
  }
  Trace t;
  t.states.push_back(inits.front());
  for (std::size_t i = 0; i < steps; ++i) {
    const auto next = successors(k, t.states.back());
    if (next.size() != 1) {
      throw NondeterminismError("state " + k.format_state(t.states.back()) + " has " +
                                std::to_string(next.size()) + " successors (no next for " +
                                unassigned(k.model().nexts) + ")");
    }
    t.states.push_back(next.front());
  }
  const auto last = successors(k, t.states.back());
  if (last.size() == 1) {
    auto it = std::find(t.states.begin(), t.states.end(), last.front());
    if (it != t.states.end()) t.loop_back = static_cast<std::size_t>(it - t.states.begin());
  }
  return t;
}

bool validate_trace(const KripkeStructure& k, const Trace& t, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (t.states.empty()) return fail("empty trace");
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    if (!k.is_valid(t.states[i])) return fail("state " + std::to_string(i) + " violates the domain");
  }
  if (!k.init_holds(t.states.front())) return fail("state 0 is not initial");
  for (std::size_t i = 0; i + 1 < t.states.size(); ++i) {
    if (!k.trans_holds(t.states[i], t.states[i + 1])) {
      return fail("no transition from state " + std::to_string(i) + " to " + std::to_string(i + 1));
    }
  }
  if (t.loop_back) {
    if (*t.loop_back >= t.states.size()) return fail("loop_back out of range");
    if (!k.trans_holds(t.states.back(), t.states[*t.loop_back])) {
      return fail("no transition closing the loop to state " + std::to_string(*t.loop_back));
    }
  }
  return true;
}

}  // namespace plancheck
