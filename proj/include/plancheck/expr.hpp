#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "plancheck/error.hpp"

namespace plancheck {

enum class ExprKind { BoolConst, EnumConst, VarRef, Not, And, Or, Eq, Case };

struct CaseBranch;
struct ExprNode;

/// Immutable state expression of the modeling language.
///
/// Nodes are shared, so copying an Expr is cheap. Equality is structural and
/// ignores source positions.
class Expr {
 public:
  static Expr boolean(bool value, SourcePos pos = {});
  static Expr enum_literal(std::string name, SourcePos pos = {});
  static Expr var(std::string name, SourcePos pos = {});
  static Expr negate(Expr operand, SourcePos pos = {});
  static Expr conj(Expr lhs, Expr rhs, SourcePos pos = {});
  static Expr disj(Expr lhs, Expr rhs, SourcePos pos = {});
  static Expr equals(Expr lhs, Expr rhs, SourcePos pos = {});
  static Expr case_of(std::vector<CaseBranch> branches, SourcePos pos = {});

  ExprKind kind() const;
  bool bool_value() const;
  /// Variable or literal name for VarRef / EnumConst.
  const std::string& name() const;
  const Expr& operand() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  std::span<const CaseBranch> branches() const;
  const SourcePos& pos() const;

  /// Count of nodes in the tree (shared nodes counted per occurrence).
  std::size_t size() const;
  bool is_true_literal() const { return kind() == ExprKind::BoolConst && bool_value(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct CaseBranch {
  Expr guard;
  Expr value;
  friend bool operator==(const CaseBranch&, const CaseBranch&) = default;
};

struct ExprNode {
  ExprKind kind;
  bool value = false;
  std::string name;
  std::vector<Expr> children;
  std::vector<CaseBranch> branches;
  SourcePos pos;
};

/// Conjunction / disjunction over a list; empty lists yield TRUE / FALSE.
Expr conj_all(std::span<const Expr> terms);
Expr disj_all(std::span<const Expr> terms);

/// Names referenced by VarRef nodes, in first-occurrence order.
std::vector<std::string> referenced_vars(const Expr& e);

}  // namespace plancheck
