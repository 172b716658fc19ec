#include "plancheck/circuit.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

namespace plancheck {

Circuit::Circuit() { nodes_.push_back({NodeKind::Const, {}, {}, 0}); }

Signal Circuit::add_input() {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({NodeKind::Input, {}, {}, static_cast<std::uint32_t>(input_nodes_.size())});
  input_nodes_.push_back(index);
  return Signal::from_raw(index << 1);
}

Signal Circuit::land(Signal a, Signal b) {
  if (a == kFalse || b == kFalse || a == !b) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue || a == b) return a;
  if (b < a) std::swap(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(a.raw()) << 32) | b.raw();
  if (auto it = gate_index_.find(key); it != gate_index_.end()) return Signal::from_raw(it->second << 1);
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({NodeKind::And, a, b, 0});
  gate_index_.emplace(key, index);
  return Signal::from_raw(index << 1);
}

Signal Circuit::conj(std::span<const Signal> terms) {
  Signal acc = kTrue;
  for (Signal t : terms) acc = land(acc, t);
  return acc;
}

Signal Circuit::disj(std::span<const Signal> terms) {
  Signal acc = kFalse;
  for (Signal t : terms) acc = lor(acc, t);
  return acc;
}

bool Circuit::evaluate(Signal root, std::span<const bool> inputs) const {
  if (inputs.size() < input_nodes_.size()) throw std::invalid_argument("missing circuit input values");
  // Nodes are created after their fanins, so one forward sweep suffices.
  std::vector<char> value(root.node() + 1, 0);
  for (std::uint32_t i = 0; i <= root.node(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Const:
        value[i] = 0;
        break;
      case NodeKind::Input:
        value[i] = inputs[n.input_index];
        break;
      case NodeKind::And:
        value[i] = (value[n.lhs.node()] ^ n.lhs.negated()) && (value[n.rhs.node()] ^ n.rhs.negated());
        break;
    }
  }
  return value[root.node()] ^ root.negated();
}

bool Circuit::evaluate(Signal root, const std::vector<bool>& inputs) const {
  std::unique_ptr<bool[]> buf(new bool[inputs.size()]);
  for (std::size_t i = 0; i < inputs.size(); ++i) buf[i] = inputs[i];
  return evaluate(root, std::span<const bool>(buf.get(), inputs.size()));
}

Signal Circuit::transfer(const Circuit& src, Signal root, std::span<const Signal> input_map,
                         std::vector<std::int64_t>& memo) {
  if (&src == this) throw std::invalid_argument("cannot transfer a circuit into itself");
  if (memo.size() < src.node_count()) memo.resize(src.node_count(), -1);
  if (input_map.size() < src.input_count()) throw std::invalid_argument("incomplete input substitution");

  // Iterative post-order walk; BMC unrollings produce deep cones.
  std::vector<std::uint32_t> stack{root.node()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (memo[n] >= 0) {
      stack.pop_back();
      continue;
    }
    const Node& node = src.nodes_[n];
    if (node.kind == NodeKind::Const) {
      memo[n] = kFalse.raw();
      stack.pop_back();
    } else if (node.kind == NodeKind::Input) {
      memo[n] = input_map[node.input_index].raw();
      stack.pop_back();
    } else {
      const bool l_ready = memo[node.lhs.node()] >= 0;
      const bool r_ready = memo[node.rhs.node()] >= 0;
      if (l_ready && r_ready) {
        auto map = [&](Signal s) {
          const Signal m = Signal::from_raw(static_cast<std::uint32_t>(memo[s.node()]));
          return s.negated() ? !m : m;
        };
        memo[n] = land(map(node.lhs), map(node.rhs)).raw();
        stack.pop_back();
      } else {
        if (!l_ready) stack.push_back(node.lhs.node());
        if (!r_ready) stack.push_back(node.rhs.node());
      }
    }
  }
  const Signal m = Signal::from_raw(static_cast<std::uint32_t>(memo[root.node()]));
  return root.negated() ? !m : m;
}

Signal Circuit::transfer(const Circuit& src, Signal root, std::span<const Signal> input_map) {
  std::vector<std::int64_t> memo;
  return transfer(src, root, input_map, memo);
}

}  // namespace plancheck
