#include "plancheck/ltl_core.hpp"

#include <algorithm>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <unordered_map>

namespace plancheck {

namespace {

std::shared_ptr<const NnfNode> node(NnfKind kind, std::vector<NnfFormula> children) {
  return std::make_shared<const NnfNode>(NnfNode{kind, Expr::boolean(true), true, std::move(children)});
}

struct Lasso {
  std::size_t length;
  std::size_t loop;
  std::size_t succ(std::size_t i) const { return i + 1 < length ? i + 1 : loop; }
};

using Values = std::vector<char>;

// Least (F/U) or greatest (G/R) fixpoint of v[i] = step(i, v[succ(i)]) on a lasso.
template <class Step>
Values fixpoint(const Lasso& lasso, bool greatest, Step step) {
  Values v(lasso.length, greatest ? 1 : 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = lasso.length; i-- > 0;) {
      const char nv = step(i, v[lasso.succ(i)]) ? 1 : 0;
      if (nv != v[i]) {
        v[i] = nv;
        changed = true;
      }
    }
  }
  return v;
}

class LtlLassoEvaluator {
 public:
  LtlLassoEvaluator(const Trace& t, const KripkeStructure& k) : t_(t), k_(k), lasso_{t.states.size(), *t.loop_back} {}

  const Values& eval(const LtlFormula& f) {
    if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
    Values v(lasso_.length);
    switch (f.kind()) {
      case LtlKind::Atom:
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = k_.holds(f.predicate(), t_.states[i]);
        break;
      case LtlKind::Not: {
        const Values& a = eval(f.operand());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = !a[i];
        break;
      }
      case LtlKind::And:
      case LtlKind::Or: {
        const Values a = eval(f.lhs());
        const Values& b = eval(f.rhs());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.kind() == LtlKind::And ? a[i] && b[i] : a[i] || b[i];
        break;
      }
      case LtlKind::Next: {
        const Values& a = eval(f.operand());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[lasso_.succ(i)];
        break;
      }
      case LtlKind::Finally: {
        const Values a = eval(f.operand());
        v = fixpoint(lasso_, false, [&](std::size_t i, bool later) { return a[i] || later; });
        break;
      }
      case LtlKind::Globally: {
        const Values a = eval(f.operand());
        v = fixpoint(lasso_, true, [&](std::size_t i, bool later) { return a[i] && later; });
        break;
      }
      case LtlKind::Until: {
        const Values a = eval(f.lhs());
        const Values b = eval(f.rhs());
        v = fixpoint(lasso_, false, [&](std::size_t i, bool later) { return b[i] || (a[i] && later); });
        break;
      }
    }
    return memo_.emplace(f.id(), std::move(v)).first->second;
  }

 private:
  const Trace& t_;
  const KripkeStructure& k_;
  Lasso lasso_;
  std::unordered_map<const void*, Values> memo_;
};

class NnfEvaluator {
 public:
  // With a loop: lasso semantics. Without: strong prefix semantics.
  NnfEvaluator(const Trace& t, const KripkeStructure& k) : t_(t), k_(k), n_(t.states.size()) {
    if (t.loop_back) lasso_ = Lasso{n_, *t.loop_back};
  }

  const Values& eval(const NnfFormula& f) {
    if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
    Values v(n_);
    switch (f.kind()) {
      case NnfKind::True:
      case NnfKind::False:
        std::fill(v.begin(), v.end(), f.kind() == NnfKind::True);
        break;
      case NnfKind::Literal:
        for (std::size_t i = 0; i < n_; ++i) v[i] = k_.holds(f.predicate(), t_.states[i]) == f.positive();
        break;
      case NnfKind::And:
      case NnfKind::Or: {
        const Values a = eval(f.lhs());
        const Values& b = eval(f.rhs());
        for (std::size_t i = 0; i < n_; ++i) v[i] = f.kind() == NnfKind::And ? a[i] && b[i] : a[i] || b[i];
        break;
      }
      case NnfKind::Next: {
        const Values& a = eval(f.operand());
        for (std::size_t i = 0; i < n_; ++i) {
          if (lasso_) {
            v[i] = a[lasso_->succ(i)];
          } else {
            v[i] = i + 1 < n_ && a[i + 1];
          }
        }
        break;
      }
      case NnfKind::Until:
      case NnfKind::Release: {
        const Values a = eval(f.lhs());
        const Values b = eval(f.rhs());
        const bool until = f.kind() == NnfKind::Until;
        auto step = [&](std::size_t i, bool later) {
          return until ? b[i] || (a[i] && later) : b[i] && (a[i] || later);
        };
        if (lasso_) {
          v = fixpoint(*lasso_, !until, step);
        } else {
          // Past the end: U has no witness, R has no release.
          bool later = false;
          for (std::size_t i = n_; i-- > 0;) {
            v[i] = i + 1 == n_ ? (until ? b[i] : b[i] && a[i]) : step(i, later);
            later = v[i];
          }
        }
        break;
      }
    }
    return memo_.emplace(f.id(), std::move(v)).first->second;
  }

 private:
  const Trace& t_;
  const KripkeStructure& k_;
  std::size_t n_;
  std::optional<Lasso> lasso_;
  std::unordered_map<const void*, Values> memo_;
};

void require_lasso(const Trace& t) {
  if (t.states.empty()) throw std::invalid_argument("empty trace");
  if (!t.loop_back || *t.loop_back >= t.states.size()) {
    throw std::invalid_argument("lasso evaluation needs a trace with a valid loop_back");
  }
}

template <class F>
void collect(const F& f, std::vector<F>& out) {
  auto visit_children = [&](const F& g) {
    if constexpr (std::is_same_v<F, LtlFormula>) {
      switch (g.kind()) {
        case LtlKind::Atom: break;
        case LtlKind::And: case LtlKind::Or: case LtlKind::Until:
          collect(g.lhs(), out);
          collect(g.rhs(), out);
          break;
        default:
          collect(g.operand(), out);
      }
    } else {
      switch (g.kind()) {
        case NnfKind::True: case NnfKind::False: case NnfKind::Literal: break;
        case NnfKind::Next:
          collect(g.operand(), out);
          break;
        default:
          collect(g.lhs(), out);
          collect(g.rhs(), out);
      }
    }
  };
  visit_children(f);
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
}

}  // namespace

NnfFormula NnfFormula::constant(bool value) { return NnfFormula(node(value ? NnfKind::True : NnfKind::False, {})); }

NnfFormula NnfFormula::literal(Expr predicate, bool positive) {
  if (!is_atomic_predicate(predicate)) throw std::invalid_argument("NNF literal needs an atomic predicate");
  return NnfFormula(std::make_shared<const NnfNode>(NnfNode{NnfKind::Literal, std::move(predicate), positive, {}}));
}

NnfFormula NnfFormula::conj(NnfFormula a, NnfFormula b) { return NnfFormula(node(NnfKind::And, {a, b})); }
NnfFormula NnfFormula::disj(NnfFormula a, NnfFormula b) { return NnfFormula(node(NnfKind::Or, {a, b})); }
NnfFormula NnfFormula::next(NnfFormula f) { return NnfFormula(node(NnfKind::Next, {f})); }
NnfFormula NnfFormula::until(NnfFormula a, NnfFormula b) { return NnfFormula(node(NnfKind::Until, {a, b})); }
NnfFormula NnfFormula::release(NnfFormula a, NnfFormula b) { return NnfFormula(node(NnfKind::Release, {a, b})); }

NnfKind NnfFormula::kind() const { return node_->kind; }
const Expr& NnfFormula::predicate() const { return node_->predicate; }
bool NnfFormula::positive() const { return node_->positive; }
const NnfFormula& NnfFormula::operand() const { return node_->children.at(0); }
const NnfFormula& NnfFormula::lhs() const { return node_->children.at(0); }
const NnfFormula& NnfFormula::rhs() const { return node_->children.at(1); }

std::size_t NnfFormula::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  return n;
}

bool operator==(const NnfFormula& a, const NnfFormula& b) {
  if (a.node_ == b.node_) return true;
  const NnfNode& x = *a.node_;
  const NnfNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  if (x.kind == NnfKind::Literal) return x.positive == y.positive && x.predicate == y.predicate;
  return x.children == y.children;
}

NnfFormula to_nnf(const LtlFormula& f, bool negate) {
  switch (f.kind()) {
    case LtlKind::Atom: {
      const Expr& p = f.predicate();
      if (p.kind() == ExprKind::BoolConst) return NnfFormula::constant(p.bool_value() != negate);
      return NnfFormula::literal(p, !negate);
    }
    case LtlKind::Not:
      return to_nnf(f.operand(), !negate);
    case LtlKind::And:
      return negate ? NnfFormula::disj(to_nnf(f.lhs(), true), to_nnf(f.rhs(), true))
                    : NnfFormula::conj(to_nnf(f.lhs(), false), to_nnf(f.rhs(), false));
    case LtlKind::Or:
      return negate ? NnfFormula::conj(to_nnf(f.lhs(), true), to_nnf(f.rhs(), true))
                    : NnfFormula::disj(to_nnf(f.lhs(), false), to_nnf(f.rhs(), false));
    case LtlKind::Next:
      return NnfFormula::next(to_nnf(f.operand(), negate));
    case LtlKind::Finally:
      return negate ? NnfFormula::release(NnfFormula::constant(false), to_nnf(f.operand(), true))
                    : NnfFormula::until(NnfFormula::constant(true), to_nnf(f.operand(), false));
    case LtlKind::Globally:
      return negate ? NnfFormula::until(NnfFormula::constant(true), to_nnf(f.operand(), true))
                    : NnfFormula::release(NnfFormula::constant(false), to_nnf(f.operand(), false));
    case LtlKind::Until:
      return negate ? NnfFormula::release(to_nnf(f.lhs(), true), to_nnf(f.rhs(), true))
                    : NnfFormula::until(to_nnf(f.lhs(), false), to_nnf(f.rhs(), false));
  }
  throw std::logic_error("malformed LTL formula");
}

bool eval_on_lasso(const LtlFormula& f, const Trace& t, const KripkeStructure& k) {
  require_lasso(t);
  return LtlLassoEvaluator(t, k).eval(f)[0];
}

bool eval_on_lasso(const NnfFormula& f, const Trace& t, const KripkeStructure& k) {
  require_lasso(t);
  return NnfEvaluator(t, k).eval(f)[0];
}

bool eval_on_prefix(const NnfFormula& f, const Trace& t, const KripkeStructure& k) {
  if (t.states.empty()) throw std::invalid_argument("empty trace");
  Trace open = t;
  open.loop_back.reset();
  return NnfEvaluator(open, k).eval(f)[0];
}

std::vector<LtlFormula> subformulas(const LtlFormula& f) {
  std::vector<LtlFormula> out;
  collect(f, out);
  return out;
}

std::vector<NnfFormula> subformulas(const NnfFormula& f) {
  std::vector<NnfFormula> out;
  collect(f, out);
  return out;
}

std::string to_string(const NnfFormula& f) {
  switch (f.kind()) {
    case NnfKind::True: return "TRUE";
    case NnfKind::False: return "FALSE";
    case NnfKind::Literal: {
      const std::string p = to_string(f.predicate());
      if (f.positive()) return p;
      return f.predicate().kind() == ExprKind::Eq ? "!(" + p + ")" : "!" + p;
    }
    case NnfKind::And: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
    case NnfKind::Or: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
    case NnfKind::Next: return "X " + to_string(f.operand());
    case NnfKind::Until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
    case NnfKind::Release: return "(" + to_string(f.lhs()) + " R " + to_string(f.rhs()) + ")";
  }
  return "?";
}

}  // namespace plancheck
