#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plancheck/error.hpp"
#include "plancheck/expr.hpp"
#include "plancheck/ltl.hpp"

namespace plancheck {

struct VarDecl {
  std::string name;
  /// Empty for boolean variables; otherwise the symbolic enum domain in
  /// declaration order.
  std::vector<std::string> literals;
  SourcePos pos;

  bool is_boolean() const { return literals.empty(); }
  bool has_literal(std::string_view lit) const;

  friend bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.literals == b.literals;
  }
};

/// A `MODULE main` model of the supported subset: boolean and symbolic-enum
/// variables, init/next assignments, and LTL specifications.
struct SmvModel {
  std::vector<VarDecl> vars;
  std::map<std::string, Expr> inits;
  std::map<std::string, Expr> nexts;
  std::vector<LtlFormula> ltlspecs;

  const VarDecl* find_var(std::string_view name) const;

  friend bool operator==(const SmvModel&, const SmvModel&) = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  std::string message;
  SourcePos pos;

  friend bool operator==(const Diagnostic& a, const Diagnostic& b) {
    return a.severity == b.severity && a.message == b.message;
  }
};

SmvModel parse_model(std::string_view text);

/// Parses a standalone formula. Identifiers are left as variable references;
/// use resolve_ltl to bind them against a model.
LtlFormula parse_ltl(std::string_view text);

/// Binds identifiers to variables or enum literals of `model` and type-checks
/// every atom. Throws ParseError on undeclared names or type mismatches.
LtlFormula resolve_ltl(const LtlFormula& f, const SmvModel& model);

std::string pretty_print(const SmvModel& model);
std::string to_string(const Expr& e);
std::string to_string(const LtlFormula& f);

std::vector<Diagnostic> check_semantics(const SmvModel& model);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace plancheck
