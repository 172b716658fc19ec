#include "plancheck/bmc.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <map>
#include <stdexcept>
#include <tuple>

#include "plancheck/error.hpp"
#include "plancheck/ltl_core.hpp"
#include "plancheck/sat.hpp"
#include "plancheck/tseitin.hpp"

namespace plancheck {

namespace {

struct BoundParts {
  std::vector<Signal> selectors;
  Signal no_loop;
  Signal constraint;  // exactly-one & loop closure & [psi]^0
};

// Builds the unrolled transition system and the LTL translation inside a
// caller-owned circuit that may keep growing across bounds.
class Unroller {
 public:
  Unroller(const KripkeStructure& k, Circuit& c) : k_(k), c_(c) {}

  std::size_t steps() const { return bits_.size(); }
  const std::vector<std::vector<Signal>>& bits() const { return bits_; }

  // Adds s_i; returns Init(s_0) for the first step and Trans(s_{i-1}, s_i) after.
  Signal add_step() {
    std::vector<Signal> b;
    for (std::size_t j = 0; j < k_.bit_count(); ++j) b.push_back(c_.add_input());
    bits_.push_back(std::move(b));
    const std::size_t i = bits_.size() - 1;
    return i == 0 ? relation(k_.init_pred(), 0, 0) : relation(k_.trans_pred(), i - 1, i);
  }

  BoundParts build_bound(const NnfFormula& psi, std::size_t bound) {
    BoundParts p;
    p.no_loop = c_.add_input();
    for (std::size_t l = 0; l <= bound; ++l) p.selectors.push_back(c_.add_input());

    std::vector<Signal> all{p.no_loop};
    all.insert(all.end(), p.selectors.begin(), p.selectors.end());
    std::vector<Signal> parts{c_.disj(all)};
    for (std::size_t a = 0; a < all.size(); ++a) {
      for (std::size_t b = a + 1; b < all.size(); ++b) parts.push_back(!c_.land(all[a], all[b]));
    }
    bound_ = bound;
    memo_.clear();
    std::vector<Signal> cases{c_.land(p.no_loop, translate(psi, 0, kNoLoop))};
    for (std::size_t l = 0; l <= bound; ++l) {
      parts.push_back(c_.implies(p.selectors[l], relation(k_.trans_pred(), bound, l)));
      cases.push_back(c_.land(p.selectors[l], translate(psi, 0, static_cast<long>(l))));
    }
    parts.push_back(c_.disj(cases));
    p.constraint = c_.conj(parts);
    return p;
  }

 private:
  static constexpr long kNoLoop = -1;

  Signal relation(Signal pred, std::size_t from, std::size_t to) {
    std::vector<Signal> map(bits_[from]);
    map.insert(map.end(), bits_[to].begin(), bits_[to].end());
    return c_.transfer(k_.circuit(), pred, map);
  }

  Signal atom(const Expr& pred, std::size_t step) {
    auto key = std::make_pair(to_string(pred), step);
    if (auto it = atoms_.find(key); it != atoms_.end()) return it->second;
    const Signal s = k_.lower(pred, c_, bits_[step]);
    atoms_.emplace(std::move(key), s);
    return s;
  }

  // [f]^i_l, or the strong no-loop translation when l == kNoLoop.
  Signal translate(const NnfFormula& f, std::size_t i, long l) {
    const auto key = std::make_tuple(f.id(), i, l);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t k = bound_;
    Signal r;
    switch (f.kind()) {
      case NnfKind::True:
        r = Circuit::kTrue;
        break;
      case NnfKind::False:
        r = Circuit::kFalse;
        break;
      case NnfKind::Literal: {
        const Signal a = atom(f.predicate(), i);
        r = f.positive() ? a : !a;
        break;
      }
      case NnfKind::And:
        r = c_.land(translate(f.lhs(), i, l), translate(f.rhs(), i, l));
        break;
      case NnfKind::Or:
        r = c_.lor(translate(f.lhs(), i, l), translate(f.rhs(), i, l));
        break;
      case NnfKind::Next:
        if (i < k) {
          r = translate(f.operand(), i + 1, l);
        } else {
          r = l == kNoLoop ? Circuit::kFalse : translate(f.operand(), static_cast<std::size_t>(l), l);
        }
        break;
      case NnfKind::Until:
      case NnfKind::Release: {
        const bool until = f.kind() == NnfKind::Until;
        auto step = [&](std::size_t j, Signal later) {
          const Signal a = translate(f.lhs(), j, l), b = translate(f.rhs(), j, l);
          return until ? c_.lor(b, c_.land(a, later)) : c_.land(b, c_.lor(a, later));
        };
        if (i < k) {
          r = step(i, translate(f, i + 1, l));
        } else if (l == kNoLoop) {
          r = until ? translate(f.rhs(), k, l) : c_.land(translate(f.rhs(), k, l), translate(f.lhs(), k, l));
        } else {
          // One more pass over the loop positions l..k after wrapping.
          Signal aux = translate(f.rhs(), k, l);
          for (std::size_t j = k; j-- > static_cast<std::size_t>(l);) aux = step(j, aux);
          r = step(k, aux);
        }
        break;
      }
    }
    memo_.emplace(key, r);
    return r;
  }

  const KripkeStructure& k_;
  Circuit& c_;
  std::vector<std::vector<Signal>> bits_;
  std::size_t bound_ = 0;
  std::map<std::tuple<const void*, std::size_t, long>, Signal> memo_;
  std::map<std::pair<std::string, std::size_t>, Signal> atoms_;
};

Trace decode_trace(const KripkeStructure& k, const std::vector<std::vector<Signal>>& bits, std::size_t bound,
                   const std::vector<Signal>& selectors, Signal no_loop, const std::function<bool(Signal)>& value) {
  Trace t;
  for (std::size_t i = 0; i <= bound; ++i) {
    auto b = std::make_unique<bool[]>(bits[i].size());
    for (std::size_t j = 0; j < bits[i].size(); ++j) b[j] = value(bits[i][j]);
    t.states.push_back(k.decode(std::span<const bool>(b.get(), bits[i].size())));
  }
  int active = value(no_loop) ? 1 : 0;
  for (std::size_t l = 0; l < selectors.size(); ++l) {
    if (value(selectors[l])) {
      ++active;
      t.loop_back = l;
    }
  }
  if (active != 1) throw DecodeError("expected exactly one active loop selector, found " + std::to_string(active));
  return t;
}

void revalidate(const KripkeStructure& k, const LtlFormula& phi, const Trace& t) {
  std::string why;
  if (!validate_trace(k, t, &why)) throw std::logic_error("counterexample is not an execution: " + why);
  const bool violates = t.loop_back ? !eval_on_lasso(phi, t, k) : eval_on_prefix(to_nnf(phi, true), t, k);
  if (!violates) throw std::logic_error("counterexample does not violate the property");
}

class Search {
 public:
  virtual ~Search() = default;
  virtual std::optional<Trace> at_bound(std::size_t bound) = 0;
};

class IncrementalSearch : public Search {
 public:
  IncrementalSearch(const KripkeStructure& k, const NnfFormula& psi)
      : k_(k), psi_(psi), unroller_(k, circuit_), encoder_(circuit_, solver_) {}

  std::optional<Trace> at_bound(std::size_t bound) override {
    while (unroller_.steps() <= bound) {
      const Signal rel = unroller_.add_step();
      const int unit[] = {encoder_.literal(rel)};
      solver_.add_clause(unit);
    }
    const BoundParts parts = unroller_.build_bound(psi_, bound);
    const int act = solver_.new_var();
    const int guard[] = {-act, encoder_.literal(parts.constraint)};
    solver_.add_clause(guard);
    const int assumption[] = {act};
    const SatResult r = solver_.solve(assumption);
    std::optional<Trace> out;
    if (r.satisfiable) {
      out = decode_trace(k_, unroller_.bits(), bound, parts.selectors, parts.no_loop, [&](Signal s) {
        const int v = encoder_.input_var(circuit_.node(s.node()).input_index);
        return v != 0 && r.value(v);
      });
    }
    const int retire[] = {-act};
    solver_.add_clause(retire);
    return out;
  }

 private:
  const KripkeStructure& k_;
  NnfFormula psi_;
  Circuit circuit_;
  Unroller unroller_;
  SatSolver solver_;
  TseitinEncoder encoder_;
};

class FreshSearch : public Search {
 public:
  FreshSearch(const KripkeStructure& k, const LtlFormula& phi) : k_(k), phi_(phi) {}

  std::optional<Trace> at_bound(std::size_t bound) override {
    const BmcEncoding enc = encode_psi_k(k_, phi_, bound);
    CnfFormula cnf;
    TseitinEncoder encoder(enc.circuit, cnf);
    const int root[] = {encoder.literal(enc.root)};
    cnf.add_clause(root);
    const SatResult r = solve(cnf);
    if (!r.satisfiable) return std::nullopt;
    std::vector<bool> inputs(enc.circuit.input_count(), false);
    for (std::uint32_t i = 0; i < inputs.size(); ++i) {
      if (const int v = encoder.input_var(i)) inputs[i] = r.value(v);
    }
    return extract_trace(k_, enc, inputs);
  }

 private:
  const KripkeStructure& k_;
  LtlFormula phi_;
};

bool has_initial_state(const KripkeStructure& k) {
  Circuit c;
  std::vector<Signal> bits;
  for (std::size_t j = 0; j < k.bit_count(); ++j) bits.push_back(c.add_input());
  std::vector<Signal> map(bits);
  map.insert(map.end(), bits.begin(), bits.end());
  const Signal init = c.transfer(k.circuit(), k.init_pred(), map);
  CnfFormula cnf;
  TseitinEncoder encoder(c, cnf);
  const int root[] = {encoder.literal(init)};
  cnf.add_clause(root);
  return solve(cnf).satisfiable;
}

}  // namespace

BmcEncoding encode_psi_k(const KripkeStructure& k, const LtlFormula& phi, std::size_t bound) {
  BmcEncoding enc;
  enc.bound = bound;
  Unroller u(k, enc.circuit);
  std::vector<Signal> parts;
  for (std::size_t i = 0; i <= bound; ++i) parts.push_back(u.add_step());
  BoundParts p = u.build_bound(to_nnf(phi, true), bound);
  parts.push_back(p.constraint);
  enc.root = enc.circuit.conj(parts);
  enc.step_bits = u.bits();
  enc.loop_selectors = std::move(p.selectors);
  enc.no_loop = p.no_loop;
  return enc;
}

Trace extract_trace(const KripkeStructure& k, const BmcEncoding& enc, const std::vector<bool>& inputs) {
  if (inputs.size() < enc.circuit.input_count()) throw std::invalid_argument("input assignment is too short");
  return decode_trace(k, enc.step_bits, enc.bound, enc.loop_selectors, enc.no_loop,
                      [&](Signal s) { return static_cast<bool>(inputs[enc.circuit.node(s.node()).input_index]); });
}

std::optional<std::size_t> completeness_bound(const KripkeStructure& k, std::size_t cap) {
  for (const auto& v : k.vars()) {
    if (v.name == "stage" && !v.is_boolean()) return v.literals.size() + 1;
  }
  try {
    return enumerate_reachable(k, cap).size();
  } catch (const CapExceeded&) {
    return std::nullopt;
  }
}

LtlFormula combined_spec(const KripkeStructure& k) {
  const auto& specs = k.model().ltlspecs;
  if (specs.empty()) return LtlFormula::atom(Expr::boolean(true));
  LtlFormula f = specs.front();
  for (std::size_t i = 1; i < specs.size(); ++i) f = LtlFormula::conj(f, specs[i]);
  return f;
}

CheckOutcome check_spec(const KripkeStructure& k, const LtlFormula& phi, const CheckOptions& options) {
  CheckOutcome out;
  if (!has_initial_state(k)) {
    out.status = CheckStatus::Holds;
    out.complete = true;
    out.vacuous = true;
    return out;
  }
  const auto complete_at = completeness_bound(k, options.reachability_cap);
  const std::size_t last = complete_at ? std::min(*complete_at, options.max_bound) : options.max_bound;

  std::unique_ptr<Search> search;
  if (options.incremental) {
    search = std::make_unique<IncrementalSearch>(k, to_nnf(phi, true));
  } else {
    search = std::make_unique<FreshSearch>(k, phi);
  }
  for (std::size_t bound = 0; bound <= last; ++bound) {
    if (auto trace = search->at_bound(bound)) {
      revalidate(k, phi, *trace);
      out.status = CheckStatus::CounterexampleFound;
      out.bound = bound;
      out.trace = std::move(trace);
      return out;
    }
  }
  if (complete_at && *complete_at <= options.max_bound) {
    out.status = CheckStatus::Holds;
    out.bound = *complete_at;
    out.complete = true;
  } else {
    out.status = CheckStatus::BoundExhausted;
    out.bound = options.max_bound;
  }
  return out;
}

CheckOutcome check_spec(const KripkeStructure& k, const LtlFormula& phi, std::size_t max_bound) {
  CheckOptions options;
  options.max_bound = max_bound;
  return check_spec(k, phi, options);
}

std::string describe(const CheckOutcome& outcome) {
  switch (outcome.status) {
    case CheckStatus::Holds:
      if (outcome.vacuous) return "LTLSPEC holds vacuously (no initial state)";
      return "LTLSPEC holds (complete at bound " + std::to_string(outcome.bound) + ")";
    case CheckStatus::CounterexampleFound:
      return "LTLSPEC violated (counterexample at bound " + std::to_string(outcome.bound) + ")";
    case CheckStatus::BoundExhausted:
      return "LTLSPEC not violated up to bound " + std::to_string(outcome.bound) + " (incomplete)";
  }
  return {};
}

}  // namespace plancheck
