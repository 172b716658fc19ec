#include <sstream>

#include "plancheck/smv.hpp"

namespace plancheck {

namespace {

// Binding strength; a child printed below the required level gets parentheses.
int expr_level(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Eq: return 3;
    case ExprKind::Not: return 4;
    default: return 5;
  }
}

void print_expr(std::ostream& os, const Expr& e, int min_level, int indent);

void print_case(std::ostream& os, const Expr& e, int indent) {
  if (indent < 0) {
    os << "case";
    for (const auto& b : e.branches()) {
      os << ' ';
      print_expr(os, b.guard, 0, -1);
      os << " : ";
      print_expr(os, b.value, 0, -1);
      os << ';';
    }
    os << " esac";
    return;
  }
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  os << "case\n";
  for (const auto& b : e.branches()) {
    os << pad << "    ";
    print_expr(os, b.guard, 0, -1);
    os << " : ";
    print_expr(os, b.value, 0, indent + 4);
    os << ";\n";
  }
  os << pad << "  esac";
}

void print_expr(std::ostream& os, const Expr& e, int min_level, int indent) {
  const bool paren = expr_level(e) < min_level;
  if (paren) os << '(';
  switch (e.kind()) {
    case ExprKind::BoolConst:
      os << (e.bool_value() ? "TRUE" : "FALSE");
      break;
    case ExprKind::EnumConst:
    case ExprKind::VarRef:
      os << e.name();
      break;
    case ExprKind::Not:
      os << '!';
      print_expr(os, e.operand(), 4, -1);
      break;
    case ExprKind::And:
      print_expr(os, e.lhs(), 2, -1);
      os << " & ";
      print_expr(os, e.rhs(), 3, -1);
      break;
    case ExprKind::Or:
      print_expr(os, e.lhs(), 1, -1);
      os << " | ";
      print_expr(os, e.rhs(), 2, -1);
      break;
    case ExprKind::Eq:
      print_expr(os, e.lhs(), 4, -1);
      os << " = ";
      print_expr(os, e.rhs(), 4, -1);
      break;
    case ExprKind::Case:
      print_case(os, e, indent);
      break;
  }
  if (paren) os << ')';
}

int ltl_level(const LtlFormula& f) {
  switch (f.kind()) {
    case LtlKind::Or: return 1;
    case LtlKind::And: return 2;
    case LtlKind::Until: return 3;
    case LtlKind::Atom: return 5;
    default: return 4;
  }
}

void print_ltl(std::ostream& os, const LtlFormula& f, int min_level) {
  const bool paren = ltl_level(f) < min_level;
  if (paren) os << '(';
  auto unary = [&](const char* op) {
    os << op;
    const LtlFormula& sub = f.operand();
    // Equality atoms are parenthesized under unary operators for readability.
    if (sub.kind() == LtlKind::Atom && sub.predicate().kind() == ExprKind::Eq) {
      os << '(';
      print_expr(os, sub.predicate(), 0, -1);
      os << ')';
    } else {
      print_ltl(os, sub, 4);
    }
  };
  switch (f.kind()) {
    case LtlKind::Atom:
      print_expr(os, f.predicate(), 0, -1);
      break;
    case LtlKind::Not: unary("!"); break;
    case LtlKind::Next: unary("X "); break;
    case LtlKind::Finally: unary("F "); break;
    case LtlKind::Globally: unary("G "); break;
    case LtlKind::And:
      print_ltl(os, f.lhs(), 2);
      os << " & ";
      print_ltl(os, f.rhs(), 3);
      break;
    case LtlKind::Or:
      print_ltl(os, f.lhs(), 1);
      os << " | ";
      print_ltl(os, f.rhs(), 2);
      break;
    case LtlKind::Until:
      print_ltl(os, f.lhs(), 4);
      os << " U ";
      print_ltl(os, f.rhs(), 3);
      break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0, -1);
  return os.str();
}

std::string to_string(const LtlFormula& f) {
  std::ostringstream os;
  print_ltl(os, f, 0);
  return os.str();
}

std::string pretty_print(const SmvModel& model) {
  std::ostringstream os;
  os << "MODULE main\nVAR\n";
  for (const auto& v : model.vars) {
    os << "  " << v.name << " : ";
    if (v.is_boolean()) {
      os << "boolean";
    } else {
      os << '{';
      for (std::size_t i = 0; i < v.literals.size(); ++i) os << (i ? ", " : "") << v.literals[i];
      os << '}';
    }
    os << ";\n";
  }
  if (!model.inits.empty() || !model.nexts.empty()) {
    os << "ASSIGN\n";
    for (const char* which : {"init", "next"}) {
      const auto& assigns = which[0] == 'i' ? model.inits : model.nexts;
      for (const auto& v : model.vars) {
        auto it = assigns.find(v.name);
        if (it == assigns.end()) continue;
        os << "  " << which << '(' << v.name << ") := ";
        print_expr(os, it->second, 0, 2);
        os << ";\n";
      }
    }
  }
  for (const auto& spec : model.ltlspecs) os << "LTLSPEC " << to_string(spec) << ";\n";
  return os.str();
}

}  // namespace plancheck
