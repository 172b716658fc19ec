#pragma once

#include <memory>
#include <string>
#include <vector>

#include "plancheck/kripke.hpp"
#include "plancheck/ltl.hpp"

namespace plancheck {

enum class NnfKind { True, False, Literal, And, Or, Next, Until, Release };

struct NnfNode;

/// LTL in negation normal form: negation only on atoms, with Release as the
/// dual of Until. F f is represented as TRUE U f and G f as FALSE R f.
class NnfFormula {
 public:
  static NnfFormula constant(bool value);
  static NnfFormula literal(Expr predicate, bool positive);
  static NnfFormula conj(NnfFormula a, NnfFormula b);
  static NnfFormula disj(NnfFormula a, NnfFormula b);
  static NnfFormula next(NnfFormula f);
  static NnfFormula until(NnfFormula a, NnfFormula b);
  static NnfFormula release(NnfFormula a, NnfFormula b);

  NnfKind kind() const;
  const Expr& predicate() const;
  bool positive() const;
  const NnfFormula& operand() const;
  const NnfFormula& lhs() const;
  const NnfFormula& rhs() const;

  std::size_t size() const;
  const void* id() const { return node_.get(); }

  friend bool operator==(const NnfFormula& a, const NnfFormula& b);

 private:
  explicit NnfFormula(std::shared_ptr<const NnfNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const NnfNode> node_;
};

struct NnfNode {
  NnfKind kind;
  Expr predicate = Expr::boolean(true);
  bool positive = true;
  std::vector<NnfFormula> children;
};

/// NNF of `f`, or of !f when `negate` is set. Size is at most 2 * f.size().
NnfFormula to_nnf(const LtlFormula& f, bool negate = false);

/// Truth at position 0 of the infinite word states[0..l-1] (states[l..k])^w.
/// Atoms are evaluated on states through the structure's labeling.
/// Throws std::invalid_argument when the trace has no loop_back.
bool eval_on_lasso(const LtlFormula& f, const Trace& t, const KripkeStructure& k);
bool eval_on_lasso(const NnfFormula& f, const Trace& t, const KripkeStructure& k);

/// Strong semantics on a loop-free prefix: X past the end is false, U needs
/// its witness inside the prefix and R needs its releasing position inside
/// the prefix. A true result means every infinite extension satisfies `f`.
bool eval_on_prefix(const NnfFormula& f, const Trace& t, const KripkeStructure& k);

/// Post-order, structurally deduplicated.
std::vector<LtlFormula> subformulas(const LtlFormula& f);
std::vector<NnfFormula> subformulas(const NnfFormula& f);

std::string to_string(const NnfFormula& f);

}  // namespace plancheck
