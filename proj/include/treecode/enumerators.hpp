#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "treecode/semiring.hpp"
#include "treecode/tensors.hpp"
#include "treecode/tree.hpp"

namespace treecode {

struct DegreeOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateSyndrome : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr unsigned kDefaultDegreeCap = 128;  // symbolic work through t=7

// Error insertion on a link: the rank-2 tensor F^alpha evaluated at f.
template <class S>
struct LinkInsertion {
  Pauli alpha = kPauliI;
  std::array<typename S::Value, 4> f{};
};

// Bottom-up contraction of the tree tensor network over a semiring.
//
//   leaf(i)  -> EnumeratorVec<S>: the 4-vector on leaf i (0-based, left to
//               right); already includes any F tensor on that leaf.
//   link(k)  -> pointer to an optional insertion on the output leg of the
//               node with flat index k (root included), or nullptr.
//
// Cost: O(2^depth) semiring node operations.
template <class S, class LeafFn, class LinkFn>
EnumeratorVec<S> contract_tree(const TreeSpec& spec, LeafFn&& leaf, LinkFn&& link) {
  struct Ctx {
    const TreeSpec& spec;
    LeafFn& leaf;
    LinkFn& link;
  } ctx{spec, leaf, link};

  auto rec = [&ctx](auto&& self, int layer, std::size_t idx) -> EnumeratorVec<S> {
    if (layer == ctx.spec.depth) return ctx.leaf(idx);
    const NodeSpec& n = ctx.spec.node(layer, idx);
    RtildeTensor rt = build_rtilde(n.gate, n.stab);
    EnumeratorVec<S> l = self(self, layer + 1, 2 * idx);
    EnumeratorVec<S> r = self(self, layer + 1, 2 * idx + 1);
    EnumeratorVec<S> u = rt.join<S>(l, r);
    if (const LinkInsertion<S>* ins = ctx.link(TreeSpec::flat_index(layer, idx))) {
      u = apply_error_tensor<S>(ins->alpha, ins->f, u);
    }
    return u;
  };
  return rec(rec, 0, 0);
}

// No-insertion link functor.
template <class S>
inline auto no_insertions() {
  return [](std::size_t) -> const LinkInsertion<S>* { return nullptr; };
}

// Complete symbolic vector enumerator: leaves carry (w, x, z, y).
PolyVec symbolic_enumerator(const TreeSpec& spec);

// Symbolic coset enumerator relative to the Pauli string `error` on the
// leaves (size 2^depth).
PolyVec symbolic_coset_enumerator(const TreeSpec& spec, const std::vector<Pauli>& error);

// Normalized logical class probabilities conditioned on the syndrome of the
// given fault. Surface rates p = (p_x, p_z, p_y); optional bulk: rates
// q = (q_x, q_z, q_y) plus a Pauli per node output (flat index order).
struct CosetProbs {
  std::array<double, 4> eta{};  // sums to 1

  int argmax() const;
  bool argmax_tied() const;
};

struct PauliRates {
  double x = 0, z = 0, y = 0;
  double total() const { return x + z + y; }
  // Rate vector indexed by Pauli code.
  std::array<double, 4> f_vector() const { return {1.0 - total(), x, z, y}; }
};

CosetProbs coset_probs(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                       const PauliRates& p);
CosetProbs coset_probs(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                       const PauliRates& p, const PauliRates& q,
                       const std::vector<Pauli>& bulk_fault);

// One recursion step for identical-node trees: substitutes the previous
// depth's enumerator components for (w, x, z, y) in the level-1 enumerator.
PolyVec recursion_step_a(const PolyVec& level1, const PolyVec& prev,
                         unsigned degree_cap = kDefaultDegreeCap);

// Level-1 enumerator of a single node (two leaves carrying (w,x,z,y)).
PolyVec level1_enumerator(const RtildeTensor& rt);

// Brute-force stabilizer-group oracle (small depths only, t <= 4).
struct BruteForceCode {
  std::vector<std::vector<Pauli>> stabilizer_group;    // all 2^(2^t - 1) elements
  std::array<std::vector<Pauli>, 3> logicals;          // bare X, Z, Y representatives
};

BruteForceCode brute_force_code(const TreeSpec& spec);
PolyVec brute_force_coset_enumerator(const TreeSpec& spec, const std::vector<Pauli>& error);

// Classification of level-1 vector enumerators over all 720 gates and the
// three stabilizer inputs.
struct Level1Class {
  PolyVec enumerator;
  int count = 0;                   // membership over 720 x 3
  TwoQubitClifford representative;
  Pauli stab = kPauliZ;
  std::int64_t d20 = 0;            // distance at depth 20 for the representative
  bool exponential_distance = false;
};

struct Level1Classification {
  std::vector<Level1Class> classes;       // exact polynomial identity
  int class_count_up_to_permutation = 0;  // secondary statistic
};

Level1Classification classify_level1();

}  // namespace treecode
