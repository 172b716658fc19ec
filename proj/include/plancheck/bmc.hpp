#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plancheck/circuit.hpp"
#include "plancheck/kripke.hpp"
#include "plancheck/ltl.hpp"

namespace plancheck {

/// psi_k = Init(s_0) & Trans(s_0, s_1) & ... & Trans(s_{k-1}, s_k)
///         & exactly-one(no_loop, L_0..L_k) & (L_l -> Trans(s_k, s_l)) & [!phi]_k
///
/// The no-loop disjunct uses the strong finite-prefix semantics, so it can only
/// be satisfied by prefixes that violate phi on every extension.
struct BmcEncoding {
  std::size_t bound = 0;
  Circuit circuit;
  std::vector<std::vector<Signal>> step_bits;  // [step][state bit], circuit inputs
  std::vector<Signal> loop_selectors;          // L_0..L_k, circuit inputs
  Signal no_loop;
  Signal root;
};

BmcEncoding encode_psi_k(const KripkeStructure& k, const LtlFormula& phi, std::size_t bound);

/// Decodes a satisfying input assignment (indexed by circuit input) of `enc`.
/// Throws DecodeError on an excluded enum code or a malformed loop selection.
Trace extract_trace(const KripkeStructure& k, const BmcEncoding& enc, const std::vector<bool>& inputs);

/// |stage domain| + 1 for models with an enum named "stage", otherwise the
/// number of reachable states if at most `cap`, otherwise nothing.
std::optional<std::size_t> completeness_bound(const KripkeStructure& k, std::size_t cap = std::size_t{1} << 16);

enum class CheckStatus { Holds, CounterexampleFound, BoundExhausted };

struct CheckOutcome {
  CheckStatus status = CheckStatus::BoundExhausted;
  /// Holds: bound proved. CounterexampleFound: bound of the trace.
  /// BoundExhausted: the largest bound searched.
  std::size_t bound = 0;
  bool complete = false;
  /// No initial state exists; the property holds trivially.
  bool vacuous = false;
  std::optional<Trace> trace;
};

struct CheckOptions {
  std::size_t max_bound = 64;
  /// One solver across bounds with activation literals; off re-encodes psi_k
  /// from scratch for each bound.
  bool incremental = true;
  std::size_t reachability_cap = std::size_t{1} << 16;
};

/// Searches bounds 0, 1, ... for a counterexample. Every counterexample is
/// replayed against the structure and the LTL evaluators before it is
/// returned.
CheckOutcome check_spec(const KripkeStructure& k, const LtlFormula& phi, const CheckOptions& options = {});
CheckOutcome check_spec(const KripkeStructure& k, const LtlFormula& phi, std::size_t max_bound);

/// The conjunction of all LTLSPECs of the structure's model (TRUE if none).
LtlFormula combined_spec(const KripkeStructure& k);

std::string describe(const CheckOutcome& outcome);

}  // namespace plancheck
