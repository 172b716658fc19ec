#include "plancheck/ltl.hpp"

#include <algorithm>
#include <stdexcept>

namespace plancheck {

namespace {

bool is_operand(const Expr& e) {
  return e.kind() == ExprKind::BoolConst || e.kind() == ExprKind::EnumConst ||
         e.kind() == ExprKind::VarRef;
}

}  // namespace

bool is_atomic_predicate(const Expr& e) {
  if (e.kind() == ExprKind::BoolConst || e.kind() == ExprKind::VarRef) return true;
  return e.kind() == ExprKind::Eq && is_operand(e.lhs()) && is_operand(e.rhs());
}

LtlFormula LtlFormula::atom(Expr predicate) {
  if (!is_atomic_predicate(predicate)) {
    throw std::invalid_argument("LTL atoms must be constants, variables, or operand equalities");
  }
  return LtlFormula(std::make_shared<const LtlNode>(LtlNode{LtlKind::Atom, std::move(predicate), {}}));
}

LtlFormula LtlFormula::negate(LtlFormula f) {
  return LtlFormula(std::make_shared<const LtlNode>(LtlNode{LtlKind::Not, Expr::boolean(true), {std::move(f)}}));
}
LtlFormula LtlFormula::conj(LtlFormula a, LtlFormula b) {
  return LtlFormula(
      std::make_shared<const LtlNode>(LtlNode{LtlKind::And, Expr::boolean(true), {std::move(a), std::move(b)}}));
}
LtlFormula LtlFormula::disj(LtlFormula a, LtlFormula b) {
  return LtlFormula(
      std::make_shared<const LtlNode>(LtlNode{LtlKind::Or, Expr::boolean(true), {std::move(a), std::move(b)}}));
}
LtlFormula LtlFormula::next(LtlFormula f) {
  return LtlFormula(std::make_shared<const LtlNode>(LtlNode{LtlKind::Next, Expr::boolean(true), {std::move(f)}}));
}
LtlFormula LtlFormula::finally(LtlFormula f) {
  return LtlFormula(
      std::make_shared<const LtlNode>(LtlNode{LtlKind::Finally, Expr::boolean(true), {std::move(f)}}));
}
LtlFormula LtlFormula::globally(LtlFormula f) {
  return LtlFormula(
      std::make_shared<const LtlNode>(LtlNode{LtlKind::Globally, Expr::boolean(true), {std::move(f)}}));
}
LtlFormula LtlFormula::until(LtlFormula a, LtlFormula b) {
  return LtlFormula(
      std::make_shared<const LtlNode>(LtlNode{LtlKind::Until, Expr::boolean(true), {std::move(a), std::move(b)}}));
}

LtlKind LtlFormula::kind() const { return node_->kind; }
const Expr& LtlFormula::predicate() const { return node_->predicate; }
const LtlFormula& LtlFormula::operand() const { return node_->children.at(0); }
const LtlFormula& LtlFormula::lhs() const { return node_->children.at(0); }
const LtlFormula& LtlFormula::rhs() const { return node_->children.at(1); }

std::size_t LtlFormula::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  return n;
}

std::size_t LtlFormula::depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

bool operator==(const LtlFormula& a, const LtlFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->kind != b.node_->kind) return false;
  if (a.node_->kind == LtlKind::Atom) return a.node_->predicate == b.node_->predicate;
  return a.node_->children == b.node_->children;
}

}  // namespace plancheck
