#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace plancheck {

/// Edge into a Circuit: node index plus a complement bit.
class Signal {
 public:
  constexpr Signal() = default;
  static constexpr Signal from_raw(std::uint32_t raw) { return Signal(raw); }

  constexpr std::uint32_t raw() const { return raw_; }
  constexpr std::uint32_t node() const { return raw_ >> 1; }
  constexpr bool negated() const { return raw_ & 1U; }
  constexpr Signal operator!() const { return Signal(raw_ ^ 1U); }

  friend constexpr bool operator==(Signal, Signal) = default;
  friend constexpr auto operator<=>(Signal, Signal) = default;

 private:
  constexpr explicit Signal(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_ = 0;
};

/// Boolean circuit DAG made of two-input AND gates, inputs, and the constant
/// node; negation lives on edges, so OR and NOT cost nothing extra. Gates are
/// hash-consed, which makes shared subcircuits appear exactly once.
class Circuit {
 public:
  enum class NodeKind : std::uint8_t { Const, Input, And };

  struct Node {
    NodeKind kind;
    Signal lhs;  // And only
    Signal rhs;
    std::uint32_t input_index = 0;  // Input only
  };

  Circuit();

  static constexpr Signal kFalse = Signal::from_raw(0);
  static constexpr Signal kTrue = Signal::from_raw(1);
  static constexpr Signal constant(bool v) { return v ? kTrue : kFalse; }

  Signal add_input();
  Signal input(std::uint32_t index) const { return Signal::from_raw(input_nodes_.at(index) << 1); }
  std::size_t input_count() const { return input_nodes_.size(); }

  Signal land(Signal a, Signal b);
  Signal lor(Signal a, Signal b) { return !land(!a, !b); }
  Signal lxor(Signal a, Signal b) { return lor(land(a, !b), land(!a, b)); }
  Signal iff(Signal a, Signal b) { return !lxor(a, b); }
  Signal implies(Signal a, Signal b) { return lor(!a, b); }
  Signal ite(Signal c, Signal t, Signal e) { return lor(land(c, t), land(!c, e)); }
  Signal conj(std::span<const Signal> terms);
  Signal disj(std::span<const Signal> terms);

  const Node& node(std::uint32_t index) const { return nodes_[index]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t gate_count() const { return nodes_.size() - 1 - input_nodes_.size(); }

  /// Evaluates `root` under the given input values (indexed by input order).
  bool evaluate(Signal root, std::span<const bool> inputs) const;
  bool evaluate(Signal root, const std::vector<bool>& inputs) const;

  /// Copies the cone of `root` from `src` into this circuit, substituting
  /// `input_map[i]` for input i of `src`. `memo` caches node translations
  /// across calls that share the same substitution.
  Signal transfer(const Circuit& src, Signal root, std::span<const Signal> input_map,
                  std::vector<std::int64_t>& memo);
  Signal transfer(const Circuit& src, Signal root, std::span<const Signal> input_map);

 private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> input_nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> gate_index_;
};

}  // namespace plancheck
