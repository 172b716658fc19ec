#pragma once

#include <cstdint>
#include <vector>

#include "plancheck/circuit.hpp"
#include "plancheck/sat.hpp"

namespace plancheck {

/// Lazily turns circuit nodes into CNF variables on a sink. Each node is
/// encoded once, so a circuit that keeps growing can be fed to the same
/// solver over several rounds.
class TseitinEncoder {
 public:
  TseitinEncoder(const Circuit& circuit, ClauseSink& sink) : circuit_(circuit), sink_(sink) {}

  /// Literal equivalent to `s`, encoding its cone on first use.
  int literal(Signal s);
  /// Variable of an input, or 0 if the input was never reached.
  int input_var(std::uint32_t input_index) const;

 private:
  const Circuit& circuit_;
  ClauseSink& sink_;
  std::vector<int> vars_;  // by node index, 0 = not encoded
};

struct TseitinResult {
  CnfFormula cnf;
  int root = 0;
};

/// CNF that is satisfiable iff `root` is. Inputs are named x<index> in the
/// name map. At most 3 clauses per gate, plus the root unit and one unit for
/// the constant node when it is reached.
TseitinResult tseitin_encode(const Circuit& circuit, Signal root);

}  // namespace plancheck
