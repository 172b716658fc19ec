#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace plancheck {

/// Receives clauses over DIMACS-style literals (+v / -v, v >= 1).
class ClauseSink {
 public:
  virtual ~ClauseSink() = default;
  virtual int new_var() = 0;
  virtual void add_clause(std::span<const int> literals) = 0;
};

struct CnfFormula : ClauseSink {
  int var_count = 0;
  std::vector<std::vector<int>> clauses;
  std::map<std::string, int> name_map;

  int new_var() override { return ++var_count; }
  void add_clause(std::span<const int> literals) override;
};

struct SatResult {
  bool satisfiable = false;
  /// Indexed by variable (entry 0 unused); empty when unsatisfiable.
  std::vector<bool> model;

  bool value(int var) const { return model.at(static_cast<std::size_t>(var)); }
  bool literal_true(int lit) const { return lit > 0 ? value(lit) : !value(-lit); }
};

/// True when `model` (indexed by variable) satisfies every clause.
bool satisfies(const CnfFormula& cnf, const std::vector<bool>& model);

std::string to_dimacs(const CnfFormula& cnf);
/// Throws ParseError on malformed input.
CnfFormula parse_dimacs(std::string_view text);

/// Complete CDCL solver: two watched literals, first-UIP clause learning,
/// lowest-index-first branching with negative polarity, no restarts. Runs
/// are deterministic for a given clause sequence. Clauses may be added
/// between solve calls; assumptions hold for a single call only.
class SatSolver : public ClauseSink {
 public:
  int new_var() override;
  void add_clause(std::span<const int> literals) override;
  void add_clause(std::initializer_list<int> literals) { add_clause(std::span<const int>(literals.begin(), literals.size())); }

  /// The returned model is re-checked against every added clause.
  SatResult solve(std::span<const int> assumptions = {});

  int var_count() const { return static_cast<int>(assigns_.size()); }
  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }

 private:
  using Lit = std::uint32_t;  // 2 * (var - 1) + sign
  static constexpr std::int32_t kNoReason = -1;

  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
  };

  Lit to_lit(int dimacs) const;
  static int var_of(Lit l) { return static_cast<int>(l >> 1); }
  static Lit neg(Lit l) { return l ^ 1U; }
  // 1 true, 0 false, -1 unassigned
  int value(Lit l) const {
    const int a = assigns_[var_of(l)];
    return a < 0 ? -1 : (a ^ static_cast<int>(l & 1U));
  }
  std::size_t decision_level() const { return trail_lim_.size(); }

  void enqueue(Lit l, std::int32_t reason);
  std::int32_t propagate();
  void analyze(std::int32_t conflict, std::vector<Lit>& learnt, std::size_t& backjump);
  void cancel_until(std::size_t level);
  void attach(std::int32_t ci);
  std::int32_t store(std::vector<Lit> lits, bool learnt);

  std::vector<Clause> clauses_;
  std::vector<std::vector<std::int32_t>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<std::size_t> level_;
  std::vector<std::int32_t> reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<char> seen_;
  std::vector<std::vector<int>> originals_;
  bool ok_ = true;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
};

SatResult solve(const CnfFormula& cnf, std::span<const int> assumptions = {});

}  // namespace plancheck
