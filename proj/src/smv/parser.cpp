#include <algorithm>
#include <set>
#include <unordered_map>

#include "lexer.hpp"
#include "plancheck/smv.hpp"

namespace plancheck {

namespace {

using detail::Token;
using detail::TokenKind;

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(detail::tokenize(text)) {}

  SmvModel model();
  LtlFormula standalone_ltl();

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(cur_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() {
    const Token& t = tokens_[cur_];
    if (cur_ + 1 < tokens_.size()) ++cur_;
    return t;
  }
  bool at_symbol(std::string_view s) const { return peek().kind == TokenKind::Symbol && peek().text == s; }
  bool at_word(std::string_view w) const { return peek().kind == TokenKind::Ident && peek().text == w; }
  bool accept_symbol(std::string_view s) {
    if (!at_symbol(s)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + expected + ", found " + found, t.pos);
  }

  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("'" + std::string(w) + "'");
    take();
  }
  const Token& expect_name(const char* what) {
    if (peek().kind != TokenKind::Ident) fail(what);
    if (detail::is_reserved_word(peek().text)) {
      throw ParseError("reserved word '" + peek().text + "' cannot be used as " + what, peek().pos);
    }
    return take();
  }

  void var_section(SmvModel& m);
  void assign_section(SmvModel& m, std::vector<std::pair<Token, Expr>>& inits,
                      std::vector<std::pair<Token, Expr>>& nexts);

  Expr expr_or();
  Expr expr_and();
  Expr expr_eq();
  Expr expr_unary();
  Expr expr_primary();

  LtlFormula ltl_or();
  LtlFormula ltl_and();
  LtlFormula ltl_until();
  LtlFormula ltl_unary();
  LtlFormula ltl_primary();
  Expr ltl_operand();

  std::vector<Token> tokens_;
  std::size_t cur_ = 0;
};

SmvModel Parser::model() {
  SmvModel m;
  std::vector<std::pair<Token, Expr>> inits;
  std::vector<std::pair<Token, Expr>> nexts;

  expect_word("MODULE");
  expect_word("main");
  if (!at_word("VAR")) fail("'VAR'");
  while (peek().kind != TokenKind::End) {
    if (at_word("VAR")) {
      take();
      var_section(m);
    } else if (at_word("ASSIGN")) {
      take();
      assign_section(m, inits, nexts);
    } else if (at_word("LTLSPEC")) {
      take();
      m.ltlspecs.push_back(ltl_or());
      accept_symbol(";");
    } else {
      fail("'VAR', 'ASSIGN' or 'LTLSPEC'");
    }
  }

  // Name resolution and typing run after the whole text is read so sections
  // may appear in any order.
  std::unordered_map<std::string, const VarDecl*> by_name;
  for (const auto& v : m.vars) {
    if (!by_name.emplace(v.name, &v).second) {
      throw ParseError("duplicate variable '" + v.name + "'", v.pos);
    }
  }
  for (const auto& v : m.vars) {
    for (const auto& lit : v.literals) {
      if (by_name.count(lit)) {
        throw ParseError("enum literal '" + lit + "' of '" + v.name + "' clashes with a variable name", v.pos);
      }
    }
  }

  auto bind = [&](std::vector<std::pair<Token, Expr>>& assigns, std::map<std::string, Expr>& out,
                  const char* which) {
    for (auto& [target, value] : assigns) {
      if (!by_name.count(target.text)) {
        throw ParseError("undeclared variable " + target.text, target.pos);
      }
      if (!out.emplace(target.text, value).second) {
        throw ParseError(std::string("duplicate ") + which + " assignment for '" + target.text + "'", target.pos);
      }
    }
  };
  bind(inits, m.inits, "init");
  bind(nexts, m.nexts, "next");
  return m;
}

void Parser::var_section(SmvModel& m) {
  bool any = false;
  while (peek().kind == TokenKind::Ident && !at_word("VAR") && !at_word("ASSIGN") && !at_word("LTLSPEC")) {
    const Token& name = expect_name("a variable name");
    VarDecl decl{name.text, {}, name.pos};
    expect_symbol(":");
    if (at_word("boolean")) {
      take();
    } else if (accept_symbol("{")) {
      std::set<std::string> seen;
      do {
        const Token& lit = expect_name("an enum literal");
        if (!seen.insert(lit.text).second) {
          throw ParseError("duplicate enum literal '" + lit.text + "'", lit.pos);
        }
        decl.literals.push_back(lit.text);
      } while (accept_symbol(","));
      expect_symbol("}");
    } else {
      fail("'boolean' or '{'");
    }
    expect_symbol(";");
    m.vars.push_back(std::move(decl));
    any = true;
  }
  if (!any) fail("a variable declaration");
}

void Parser::assign_section(SmvModel&, std::vector<std::pair<Token, Expr>>& inits,
                            std::vector<std::pair<Token, Expr>>& nexts) {
  while (at_word("init") || at_word("next")) {
    const bool is_init = take().text == "init";
    expect_symbol("(");
    Token target = expect_name("a variable name");
    expect_symbol(")");
    expect_symbol(":=");
    Expr value = expr_or();
    expect_symbol(";");
    (is_init ? inits : nexts).emplace_back(std::move(target), std::move(value));
  }
}

Expr Parser::expr_or() {
  Expr e = expr_and();
  while (at_symbol("|")) {
    const SourcePos pos = take().pos;
    e = Expr::disj(e, expr_and(), pos);
  }
  return e;
}

Expr Parser::expr_and() {
  Expr e = expr_eq();
  while (at_symbol("&")) {
    const SourcePos pos = take().pos;
    e = Expr::conj(e, expr_eq(), pos);
  }
  return e;
}

Expr Parser::expr_eq() {
  Expr e = expr_unary();
  if (at_symbol("=")) {
    const SourcePos pos = take().pos;
    e = Expr::equals(e, expr_unary(), pos);
  }
  return e;
}

Expr Parser::expr_unary() {
  if (at_symbol("!")) {
    const SourcePos pos = take().pos;
    return Expr::negate(expr_unary(), pos);
  }
  return expr_primary();
}

Expr Parser::expr_primary() {
  const Token& t = peek();
  if (at_symbol("(")) {
    take();
    Expr e = expr_or();
    expect_symbol(")");
    return e;
  }
  if (at_word("TRUE") || at_word("FALSE")) {
    take();
    return Expr::boolean(t.text == "TRUE", t.pos);
  }
  if (at_word("case")) {
    const SourcePos pos = take().pos;
    std::vector<CaseBranch> branches;
    do {
      Expr guard = expr_or();
      expect_symbol(":");
      Expr value = expr_or();
      expect_symbol(";");
      branches.push_back({std::move(guard), std::move(value)});
    } while (!at_word("esac"));
    take();
    return Expr::case_of(std::move(branches), pos);
  }
  if (t.kind == TokenKind::Ident) {
    const Token& name = expect_name("an expression");
    return Expr::var(name.text, name.pos);
  }
  fail("an expression");
}

LtlFormula Parser::standalone_ltl() {
  LtlFormula f = ltl_or();
  accept_symbol(";");
  if (peek().kind != TokenKind::End) fail("end of formula");
  return f;
}

LtlFormula Parser::ltl_or() {
  LtlFormula f = ltl_and();
  while (accept_symbol("|")) f = LtlFormula::disj(f, ltl_and());
  return f;
}

LtlFormula Parser::ltl_and() {
  LtlFormula f = ltl_until();
  while (accept_symbol("&")) f = LtlFormula::conj(f, ltl_until());
  return f;
}

LtlFormula Parser::ltl_until() {
  LtlFormula f = ltl_unary();
  if (at_word("U")) {
    take();
    return LtlFormula::until(f, ltl_until());
  }
  return f;
}

LtlFormula Parser::ltl_unary() {
  if (accept_symbol("!")) return LtlFormula::negate(ltl_unary());
  if (at_word("X")) {
    take();
    return LtlFormula::next(ltl_unary());
  }
  if (at_word("F")) {
    take();
    return LtlFormula::finally(ltl_unary());
  }
  if (at_word("G")) {
    take();
    return LtlFormula::globally(ltl_unary());
  }
  return ltl_primary();
}

LtlFormula Parser::ltl_primary() {
  if (accept_symbol("(")) {
    LtlFormula f = ltl_or();
    expect_symbol(")");
    return f;
  }
  Expr lhs = ltl_operand();
  if (at_symbol("=")) {
    const SourcePos pos = take().pos;
    Expr rhs = ltl_operand();
    return LtlFormula::atom(Expr::equals(lhs, rhs, pos));
  }
  return LtlFormula::atom(lhs);
}

Expr Parser::ltl_operand() {
  const Token& t = peek();
  if (at_word("TRUE") || at_word("FALSE")) {
    take();
    return Expr::boolean(t.text == "TRUE", t.pos);
  }
  if (t.kind != TokenKind::Ident) fail("a formula");
  const Token& name = expect_name("an atomic proposition");
  return Expr::var(name.text, name.pos);
}

// ---------------------------------------------------------------------------
// Name resolution and typing.

struct Type {
  bool is_bool = true;
  std::set<std::string> literals;  // possible values when !is_bool
};

class Resolver {
 public:
  explicit Resolver(const SmvModel& m) {
    for (const auto& v : m.vars) {
      vars_.emplace(v.name, &v);
      for (const auto& lit : v.literals) literals_.insert(lit);
    }
  }

  std::pair<Expr, Type> resolve(const Expr& e) const;
  Expr assignment(const std::string& var, const Expr& value) const;
  LtlFormula ltl(const LtlFormula& f) const;

 private:
  static std::string describe(const Type& t) {
    if (t.is_bool) return "boolean";
    std::string s = "{";
    for (const auto& l : t.literals) s += (s.size() > 1 ? ", " : "") + l;
    return s + "}";
  }

  Expr require_bool(const Expr& e, const char* context) const {
    auto [r, t] = resolve(e);
    if (!t.is_bool) {
      throw ParseError(std::string("type mismatch: ") + context + " must be boolean, got " + describe(t), e.pos());
    }
    return r;
  }

  std::unordered_map<std::string, const VarDecl*> vars_;
  std::set<std::string> literals_;
};

std::pair<Expr, Type> Resolver::resolve(const Expr& e) const {
  switch (e.kind()) {
    case ExprKind::BoolConst:
      return {e, Type{}};
    case ExprKind::EnumConst:
      return {e, Type{false, {e.name()}}};
    case ExprKind::VarRef: {
      if (auto it = vars_.find(e.name()); it != vars_.end()) {
        const VarDecl& d = *it->second;
        if (d.is_boolean()) return {e, Type{}};
        return {e, Type{false, {d.literals.begin(), d.literals.end()}}};
      }
      if (literals_.count(e.name())) {
        return {Expr::enum_literal(e.name(), e.pos()), Type{false, {e.name()}}};
      }
      throw ParseError("undeclared variable " + e.name(), e.pos());
    }
    case ExprKind::Not:
      return {Expr::negate(require_bool(e.operand(), "operand of '!'"), e.pos()), Type{}};
    case ExprKind::And:
      return {Expr::conj(require_bool(e.lhs(), "operand of '&'"), require_bool(e.rhs(), "operand of '&'"),
                         e.pos()),
              Type{}};
    case ExprKind::Or:
      return {Expr::disj(require_bool(e.lhs(), "operand of '|'"), require_bool(e.rhs(), "operand of '|'"),
                         e.pos()),
              Type{}};
    case ExprKind::Eq: {
      auto [l, lt] = resolve(e.lhs());
      auto [r, rt] = resolve(e.rhs());
      if (lt.is_bool != rt.is_bool) {
        throw ParseError("type mismatch: cannot compare " + describe(lt) + " with " + describe(rt), e.pos());
      }
      if (!lt.is_bool) {
        std::vector<std::string> common;
        std::set_intersection(lt.literals.begin(), lt.literals.end(), rt.literals.begin(), rt.literals.end(),
                              std::back_inserter(common));
        if (common.empty()) {
          const bool lit_vs_var = (l.kind() == ExprKind::EnumConst) != (r.kind() == ExprKind::EnumConst);
          if (lit_vs_var) {
            const Expr& lit = l.kind() == ExprKind::EnumConst ? l : r;
            const Expr& other = l.kind() == ExprKind::EnumConst ? r : l;
            throw ParseError("type mismatch: literal '" + lit.name() + "' is not in the domain of " +
                                 (other.kind() == ExprKind::VarRef ? "'" + other.name() + "'" : describe(lt)),
                             lit.pos());
          }
          throw ParseError("type mismatch: comparison between disjoint enum types " + describe(lt) + " and " +
                               describe(rt),
                           e.pos());
        }
      }
      return {Expr::equals(l, r, e.pos()), Type{}};
    }
    case ExprKind::Case: {
      std::vector<CaseBranch> out;
      Type result;
      bool first = true;
      for (const auto& b : e.branches()) {
        Expr guard = require_bool(b.guard, "case guard");
        auto [value, vt] = resolve(b.value);
        if (first) {
          result = vt;
          first = false;
        } else if (vt.is_bool != result.is_bool) {
          throw ParseError("type mismatch: case branches mix " + describe(result) + " and " + describe(vt),
                           b.value.pos());
        } else {
          result.literals.insert(vt.literals.begin(), vt.literals.end());
        }
        out.push_back({std::move(guard), std::move(value)});
      }
      return {Expr::case_of(std::move(out), e.pos()), result};
    }
  }
  throw ParseError("malformed expression", e.pos());
}

Expr Resolver::assignment(const std::string& var, const Expr& value) const {
  const VarDecl& d = *vars_.at(var);
  auto [r, t] = resolve(value);
  if (d.is_boolean() != t.is_bool) {
    throw ParseError("type mismatch: cannot assign " + describe(t) + " to '" + var + "'", value.pos());
  }
  for (const auto& lit : t.literals) {
    if (!d.has_literal(lit)) {
      throw ParseError("type mismatch: value '" + lit + "' is not in the domain of '" + var + "'", value.pos());
    }
  }
  return r;
}

LtlFormula Resolver::ltl(const LtlFormula& f) const {
  switch (f.kind()) {
    case LtlKind::Atom:
      return LtlFormula::atom(require_bool(f.predicate(), "atomic proposition"));
    case LtlKind::Not:
      return LtlFormula::negate(ltl(f.operand()));
    case LtlKind::Next:
      return LtlFormula::next(ltl(f.operand()));
    case LtlKind::Finally:
      return LtlFormula::finally(ltl(f.operand()));
    case LtlKind::Globally:
      return LtlFormula::globally(ltl(f.operand()));
    case LtlKind::And:
      return LtlFormula::conj(ltl(f.lhs()), ltl(f.rhs()));
    case LtlKind::Or:
      return LtlFormula::disj(ltl(f.lhs()), ltl(f.rhs()));
    case LtlKind::Until:
      return LtlFormula::until(ltl(f.lhs()), ltl(f.rhs()));
  }
  return f;
}

}  // namespace

bool VarDecl::has_literal(std::string_view lit) const {
  return std::find(literals.begin(), literals.end(), lit) != literals.end();
}

const VarDecl* SmvModel::find_var(std::string_view name) const {
  for (const auto& v : vars) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

SmvModel parse_model(std::string_view text) {
  SmvModel raw = Parser(text).model();
  Resolver resolver(raw);
  SmvModel out;
  out.vars = raw.vars;
  for (const auto& [var, value] : raw.inits) out.inits.emplace(var, resolver.assignment(var, value));
  for (const auto& [var, value] : raw.nexts) out.nexts.emplace(var, resolver.assignment(var, value));
  for (const auto& spec : raw.ltlspecs) out.ltlspecs.push_back(resolver.ltl(spec));
  return out;
}

LtlFormula parse_ltl(std::string_view text) { return Parser(text).standalone_ltl(); }

LtlFormula resolve_ltl(const LtlFormula& f, const SmvModel& model) { return Resolver(model).ltl(f); }

}  // namespace plancheck
