#include <algorithm>

#include "plancheck/smv.hpp"

namespace plancheck {

namespace {

void check_cases(const Expr& e, std::vector<Diagnostic>& out) {
  switch (e.kind()) {
    case ExprKind::Case: {
      const auto branches = e.branches();
      if (!branches.back().guard.is_true_literal()) {
        out.push_back({Severity::Error, "case not total: final branch guard must be TRUE", e.pos()});
      }
      for (const auto& b : branches) {
        check_cases(b.guard, out);
        check_cases(b.value, out);
      }
      return;
    }
    case ExprKind::Not:
      check_cases(e.operand(), out);
      return;
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Eq:
      check_cases(e.lhs(), out);
      check_cases(e.rhs(), out);
      return;
    default:
      return;
  }
}

}  // namespace

std::vector<Diagnostic> check_semantics(const SmvModel& model) {
  std::vector<Diagnostic> out;
  for (const auto& v : model.vars) {
    if (auto it = model.inits.find(v.name); it != model.inits.end()) {
      check_cases(it->second, out);
    } else {
      out.push_back({Severity::Warning, "unconstrained init: '" + v.name + "' may start with any value", v.pos});
    }
    if (auto it = model.nexts.find(v.name); it != model.nexts.end()) {
      check_cases(it->second, out);
    } else {
      out.push_back({Severity::Warning, "unconstrained next: '" + v.name + "' may change nondeterministically",
                     v.pos});
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace plancheck
