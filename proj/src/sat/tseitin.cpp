#include "plancheck/tseitin.hpp"

#include <string>

namespace plancheck {

int TseitinEncoder::literal(Signal s) {
  if (vars_.size() < circuit_.node_count()) vars_.resize(circuit_.node_count(), 0);
  std::vector<std::uint32_t> stack{s.node()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (vars_[n] != 0) {
      stack.pop_back();
      continue;
    }
    const auto& node = circuit_.node(n);
    if (node.kind == Circuit::NodeKind::And) {
      const std::uint32_t a = node.lhs.node(), b = node.rhs.node();
      if (vars_[a] == 0 || vars_[b] == 0) {
        if (vars_[a] == 0) stack.push_back(a);
        if (vars_[b] == 0) stack.push_back(b);
        continue;
      }
      const int g = sink_.new_var();
      const int la = node.lhs.negated() ? -vars_[a] : vars_[a];
      const int lb = node.rhs.negated() ? -vars_[b] : vars_[b];
      const int c1[] = {-g, la};
      const int c2[] = {-g, lb};
      const int c3[] = {g, -la, -lb};
      sink_.add_clause(c1);
      sink_.add_clause(c2);
      sink_.add_clause(c3);
      vars_[n] = g;
    } else {
      vars_[n] = sink_.new_var();
      if (node.kind == Circuit::NodeKind::Const) {
        // node 0 is FALSE
        const int unit[] = {-vars_[n]};
        sink_.add_clause(unit);
      }
    }
    stack.pop_back();
  }
  const int v = vars_[s.node()];
  return s.negated() ? -v : v;
}

int TseitinEncoder::input_var(std::uint32_t input_index) const {
  const std::uint32_t n = circuit_.input(input_index).node();
  return n < vars_.size() ? vars_[n] : 0;
}

TseitinResult tseitin_encode(const Circuit& circuit, Signal root) {
  TseitinResult r;
  TseitinEncoder enc(circuit, r.cnf);
  r.root = enc.literal(root);
  const int unit[] = {r.root};
  r.cnf.add_clause(unit);
  for (std::uint32_t i = 0; i < circuit.input_count(); ++i) {
    if (const int v = enc.input_var(i)) r.cnf.name_map["x" + std::to_string(i)] = v;
  }
  return r;
}

}  // namespace plancheck
