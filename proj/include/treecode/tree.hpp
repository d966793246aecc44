#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "treecode/pauli.hpp"

namespace treecode {

// One node of the encoding tree: a two-qubit Clifford gate plus the choice
// of stabilizer input fed into its right leg.
struct NodeSpec {
  TwoQubitClifford gate;
  Pauli stab = kPauliZ;

  bool operator==(const NodeSpec&) const = default;
};

// Balanced binary tree of depth t: 2^t - 1 nodes, 2^t leaves. Nodes are
// addressed by (layer, index) with layer 0 the root; node (l, i) has children
// (l+1, 2i) and (l+1, 2i+1), and the bottom layer's outputs are the leaves.
struct TreeSpec {
  int depth = 0;
  std::vector<NodeSpec> nodes;  // heap order: flat index (1<<layer) - 1 + idx

  static TreeSpec uniform(int depth, const NodeSpec& n);
  // One NodeSpec per layer, from the root down (size == depth).
  static TreeSpec layered(int depth, const std::vector<NodeSpec>& per_layer);

  std::size_t node_count() const { return (std::size_t{1} << depth) - 1; }
  std::size_t leaf_count() const { return std::size_t{1} << depth; }

  static std::size_t flat_index(int layer, std::size_t idx) {
    return (std::size_t{1} << layer) - 1 + idx;
  }
  const NodeSpec& node(int layer, std::size_t idx) const {
    return nodes[flat_index(layer, idx)];
  }
  NodeSpec& node(int layer, std::size_t idx) { return nodes[flat_index(layer, idx)]; }

  // True if every layer uses a single NodeSpec.
  bool is_layered() const;

  std::string to_json() const;
  static TreeSpec from_json(const std::string& text);
  static TreeSpec from_json_file(const std::string& path);
  void save_json(const std::string& path) const;
};

}  // namespace treecode
