#pragma once

#include <memory>
#include <string>
#include <vector>

#include "plancheck/expr.hpp"

namespace plancheck {

enum class LtlKind { Atom, Not, And, Or, Next, Finally, Globally, Until };

struct LtlNode;

/// Surface LTL formula: p | !f | f & g | f | g | X f | F f | G f | f U g.
///
/// Atoms are restricted to atomic state predicates: a boolean constant, a
/// variable reference, or an equality between two such operands. Boolean
/// structure above atoms lives at the LTL level so that printing and parsing
/// stay inverse to each other.
class LtlFormula {
 public:
  static LtlFormula atom(Expr predicate);
  static LtlFormula negate(LtlFormula f);
  static LtlFormula conj(LtlFormula a, LtlFormula b);
  static LtlFormula disj(LtlFormula a, LtlFormula b);
  static LtlFormula next(LtlFormula f);
  static LtlFormula finally(LtlFormula f);
  static LtlFormula globally(LtlFormula f);
  static LtlFormula until(LtlFormula a, LtlFormula b);

  LtlKind kind() const;
  const Expr& predicate() const;
  const LtlFormula& operand() const;
  const LtlFormula& lhs() const;
  const LtlFormula& rhs() const;

  std::size_t size() const;
  std::size_t depth() const;
  /// Stable identity of the shared node, used for memoization.
  const void* id() const { return node_.get(); }

  friend bool operator==(const LtlFormula& a, const LtlFormula& b);

 private:
  explicit LtlFormula(std::shared_ptr<const LtlNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const LtlNode> node_;
};

struct LtlNode {
  LtlKind kind;
  Expr predicate = Expr::boolean(true);
  std::vector<LtlFormula> children;
};

/// True when `e` may appear as an LTL atom.
bool is_atomic_predicate(const Expr& e);

}  // namespace plancheck
