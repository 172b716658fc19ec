#include "plancheck/expr.hpp"

#include <algorithm>
#include <stdexcept>

namespace plancheck {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode node) {
  return std::make_shared<const ExprNode>(std::move(node));
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::VarRef:
      if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
      return;
    case ExprKind::BoolConst:
    case ExprKind::EnumConst:
      return;
    case ExprKind::Not:
      collect_vars(e.operand(), out);
      return;
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Eq:
      collect_vars(e.lhs(), out);
      collect_vars(e.rhs(), out);
      return;
    case ExprKind::Case:
      for (const auto& b : e.branches()) {
        collect_vars(b.guard, out);
        collect_vars(b.value, out);
      }
      return;
  }
}

}  // namespace

Expr Expr::boolean(bool value, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::BoolConst, .value = value, .pos = pos}));
}

Expr Expr::enum_literal(std::string name, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::EnumConst, .name = std::move(name), .pos = pos}));
}

Expr Expr::var(std::string name, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::VarRef, .name = std::move(name), .pos = pos}));
}

Expr Expr::negate(Expr operand, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::Not, .children = {std::move(operand)}, .pos = pos}));
}

Expr Expr::conj(Expr lhs, Expr rhs, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::And, .children = {std::move(lhs), std::move(rhs)}, .pos = pos}));
}

Expr Expr::disj(Expr lhs, Expr rhs, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::Or, .children = {std::move(lhs), std::move(rhs)}, .pos = pos}));
}

Expr Expr::equals(Expr lhs, Expr rhs, SourcePos pos) {
  return Expr(make_node({.kind = ExprKind::Eq, .children = {std::move(lhs), std::move(rhs)}, .pos = pos}));
}

Expr Expr::case_of(std::vector<CaseBranch> branches, SourcePos pos) {
  if (branches.empty()) throw std::invalid_argument("case expression needs at least one branch");
  return Expr(make_node({.kind = ExprKind::Case, .branches = std::move(branches), .pos = pos}));
}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::bool_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const Expr& Expr::operand() const { return node_->children.at(0); }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
std::span<const CaseBranch> Expr::branches() const { return node_->branches; }
const SourcePos& Expr::pos() const { return node_->pos; }

std::size_t Expr::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  for (const auto& b : node_->branches) n += b.guard.size() + b.value.size();
  return n;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case ExprKind::BoolConst:
      return x.value == y.value;
    case ExprKind::EnumConst:
    case ExprKind::VarRef:
      return x.name == y.name;
    default:
      return x.children == y.children && x.branches == y.branches;
  }
}

Expr conj_all(std::span<const Expr> terms) {
  if (terms.empty()) return Expr::boolean(true);
  Expr acc = terms.front();
  for (const auto& t : terms.subspan(1)) acc = Expr::conj(acc, t);
  return acc;
}

Expr disj_all(std::span<const Expr> terms) {
  if (terms.empty()) return Expr::boolean(false);
  Expr acc = terms.front();
  for (const auto& t : terms.subspan(1)) acc = Expr::disj(acc, t);
  return acc;
}

std::vector<std::string> referenced_vars(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

}  // namespace plancheck
