#include "plancheck/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "plancheck/error.hpp"

namespace plancheck {

void CnfFormula::add_clause(std::span<const int> literals) {
  for (int l : literals) {
    if (l == 0 || std::abs(l) > var_count) throw std::invalid_argument("literal out of range: " + std::to_string(l));
  }
  clauses.emplace_back(literals.begin(), literals.end());
}

bool satisfies(const CnfFormula& cnf, const std::vector<bool>& model) {
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (int l : clause) {
      const auto v = static_cast<std::size_t>(std::abs(l));
      if (v < model.size() && model[v] == (l > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

std::string to_dimacs(const CnfFormula& cnf) {
  std::ostringstream out;
  for (const auto& [name, var] : cnf.name_map) out << "c var " << name << ' ' << var << '\n';
  out << "p cnf " << cnf.var_count << ' ' << cnf.clauses.size() << '\n';
  for (const auto& clause : cnf.clauses) {
    for (int l : clause) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula cnf;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<int> current;
  std::size_t offset = 0;
  int line_no = 0;
  while (offset <= text.size()) {
    const std::size_t end = std::min(text.find('\n', offset), text.size());
    const std::string line(text.substr(offset, end - offset));
    const SourcePos pos{++line_no, 1, offset};
    offset = end + 1;
    std::istringstream in(line);
    std::string first;
    if (!(in >> first)) continue;
    if (first == "c") {
      std::string tag, name;
      int var = 0;
      if (in >> tag >> name >> var && tag == "var") cnf.name_map[name] = var;
      continue;
    }
    if (first == "p") {
      std::string fmt;
      long long vars = -1, count = -1;
      if (header || !(in >> fmt >> vars >> count) || fmt != "cnf" || vars < 0 || count < 0) {
        throw ParseError("malformed problem line", pos);
      }
      header = true;
      cnf.var_count = static_cast<int>(vars);
      declared_clauses = static_cast<std::size_t>(count);
      continue;
    }
    if (!header) throw ParseError("clause before problem line", pos);
    std::istringstream toks(line);
    std::string tok;
    while (toks >> tok) {
      char* rest = nullptr;
      const long v = std::strtol(tok.c_str(), &rest, 10);
      if (*rest != '\0') throw ParseError("bad literal '" + tok + "'", pos);
      if (v == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
      } else if (std::labs(v) > cnf.var_count) {
        throw ParseError("literal out of range: " + tok, pos);
      } else {
        current.push_back(static_cast<int>(v));
      }
    }
  }
  if (!header) throw ParseError("missing problem line", SourcePos{line_no, 1, text.size()});
  if (!current.empty()) throw ParseError("unterminated clause", SourcePos{line_no, 1, text.size()});
  if (cnf.clauses.size() != declared_clauses) {
    throw ParseError("expected " + std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(cnf.clauses.size()),
                     SourcePos{line_no, 1, text.size()});
  }
  return cnf;
}

int SatSolver::new_var() {
  assigns_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  return var_count();
}

SatSolver::Lit SatSolver::to_lit(int dimacs) const {
  if (dimacs == 0 || std::abs(dimacs) > var_count()) {
    throw std::invalid_argument("literal out of range: " + std::to_string(dimacs));
  }
  return static_cast<Lit>(2 * (std::abs(dimacs) - 1) + (dimacs < 0 ? 1 : 0));
}

void SatSolver::add_clause(std::span<const int> literals) {
  std::vector<Lit> lits;
  lits.reserve(literals.size());
  for (int l : literals) lits.push_back(to_lit(l));
  originals_.emplace_back(literals.begin(), literals.end());
  if (!ok_) return;
  cancel_until(0);

  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;  // tautology
    const int v = value(lits[i]);
    if (v == 1) return;
    if (v == -1) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    ok_ = false;
  } else if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
  } else {
    attach(store(std::move(kept), false));
  }
}

std::int32_t SatSolver::store(std::vector<Lit> lits, bool learnt) {
  clauses_.push_back(Clause{std::move(lits), learnt});
  return static_cast<std::int32_t>(clauses_.size() - 1);
}

void SatSolver::attach(std::int32_t ci) {
  const auto& c = clauses_[ci].lits;
  watches_[c[0]].push_back(ci);
  watches_[c[1]].push_back(ci);
}

void SatSolver::enqueue(Lit l, std::int32_t reason) {
  const int v = var_of(l);
  assigns_[v] = static_cast<std::int8_t>((l & 1U) ^ 1U);
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

// Watch lists are keyed by the literal whose falsification wakes the clause.
std::int32_t SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit false_lit = neg(trail_[qhead_++]);
    auto& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      const std::int32_t ci = ws[i++];
      auto& c = clauses_[ci].lits;
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(j);
  }
  return kNoReason;
}

void SatSolver::analyze(std::int32_t conflict, std::vector<Lit>& learnt, std::size_t& backjump) {
  learnt.assign(1, 0);
  int path = 0;
  bool have_p = false;
  Lit p = 0;
  std::size_t index = trail_.size();
  std::int32_t confl = conflict;
  do {
    const auto& c = clauses_[confl].lits;
    for (std::size_t k = have_p ? 1 : 0; k < c.size(); ++k) {
      const Lit q = c[k];
      const int v = var_of(q);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    have_p = true;
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  backjump = 0;
  std::size_t best = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (level_[var_of(learnt[k])] > backjump) {
      backjump = level_[var_of(learnt[k])];
      best = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[best]);
  for (Lit l : learnt) seen_[var_of(l)] = 0;
}

void SatSolver::cancel_until(std::size_t level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
    const int v = var_of(trail_[i]);
    assigns_[v] = -1;
    reason_[v] = kNoReason;
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

SatResult SatSolver::solve(std::span<const int> assumptions) {
  std::vector<Lit> assume;
  for (int a : assumptions) assume.push_back(to_lit(a));
  if (!ok_) return {};
  cancel_until(0);
  if (propagate() != kNoReason) {
    ok_ = false;
    return {};
  }

  std::vector<Lit> learnt;
  std::size_t cursor = 0;
  for (;;) {
    const std::int32_t confl = propagate();
    if (confl != kNoReason) {
      ++conflicts_;
      if (decision_level() == 0) {
        ok_ = false;
        return {};
      }
      std::size_t backjump = 0;
      analyze(confl, learnt, backjump);
      cancel_until(backjump);
      cursor = 0;
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const std::int32_t ci = store(learnt, true);
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }

    bool have_next = false;
    Lit next = 0;
    while (decision_level() < assume.size()) {
      const Lit a = assume[decision_level()];
      const int v = value(a);
      if (v == 1) {
        trail_lim_.push_back(trail_.size());
      } else if (v == 0) {
        cancel_until(0);
        return {};
      } else {
        next = a;
        have_next = true;
        break;
      }
    }
    if (!have_next) {
      while (cursor < assigns_.size() && assigns_[cursor] >= 0) ++cursor;
      if (cursor == assigns_.size()) break;
      next = static_cast<Lit>(2 * cursor + 1);  // false first
      have_next = true;
    }
    ++decisions_;
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }

  SatResult result;
  result.satisfiable = true;
  result.model.assign(assigns_.size() + 1, false);
  for (std::size_t v = 0; v < assigns_.size(); ++v) result.model[v + 1] = assigns_[v] == 1;
  cancel_until(0);
  for (const auto& clause : originals_) {
    if (std::none_of(clause.begin(), clause.end(), [&](int l) { return result.literal_true(l); })) {
      throw std::logic_error("SAT model fails verification");
    }
  }
  return result;
}

SatResult solve(const CnfFormula& cnf, std::span<const int> assumptions) {
  SatSolver solver;
  for (int v = 0; v < cnf.var_count; ++v) solver.new_var();
  for (const auto& clause : cnf.clauses) solver.add_clause(clause);
  return solver.solve(assumptions);
}

}  // namespace plancheck
