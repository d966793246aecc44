#pragma once

#include <array>

#include "treecode/pauli.hpp"
#include "treecode/semiring.hpp"

namespace treecode {

// Rank-4 encoding tensor of a single node: R^{ab}_{ij} = 1 iff the logical
// pair P_i P_j is encoded as the physical pair P_a P_b. Stored as the
// bijection (i,j) -> (a,b) over the 16 two-qubit Paulis.
struct RTensor {
  std::array<PauliPair, 16> image{};  // index i + 4*j

  const PauliPair& at(Pauli i, Pauli j) const { return image[i + 4 * j]; }
};

RTensor build_r(const TwoQubitClifford& g);

// Rank-3 tensor obtained from R by feeding the stabilizer input P_s on the
// right leg: each logical class i keeps the two physical pairs coming from
// j = 0 and j = s.
struct RtildeTensor {
  std::array<std::array<PauliPair, 2>, 4> pairs{};
  Pauli stab = kPauliZ;

  // Semiring join of two child vectors through this tensor.
  template <class S>
  EnumeratorVec<S> join(const EnumeratorVec<S>& left, const EnumeratorVec<S>& right) const {
    EnumeratorVec<S> out{S::zero(), S::zero(), S::zero(), S::zero()};
    for (int i = 0; i < 4; ++i) {
      const auto& p0 = pairs[i][0];
      const auto& p1 = pairs[i][1];
      out[i] = S::add(S::mul(left[p0.left], right[p0.right]),
                      S::mul(left[p1.left], right[p1.right]));
    }
    return out;
  }

  // Dense key for deduplication (order of the two pairs is canonicalized).
  std::uint64_t key() const;
};

RtildeTensor build_rtilde(const RTensor& r, Pauli stab);
RtildeTensor build_rtilde(const TwoQubitClifford& g, Pauli stab);

// Applies the rank-2 error tensor F^alpha, F_{ij} = f_{alpha+i+j} (Pauli
// sums), to a vector: out_i = sum_j F_{ij} v_j.
template <class S>
EnumeratorVec<S> apply_error_tensor(Pauli alpha,
                                    const std::array<typename S::Value, 4>& f,
                                    const EnumeratorVec<S>& v) {
  EnumeratorVec<S> out{S::zero(), S::zero(), S::zero(), S::zero()};
  for (int i = 0; i < 4; ++i) {
    typename S::Value acc = S::zero();
    for (int j = 0; j < 4; ++j) {
      Pauli idx = pauli_mul(pauli_mul(alpha, static_cast<Pauli>(i)), static_cast<Pauli>(j));
      acc = S::add(acc, S::mul(f[idx], v[j]));
    }
    out[i] = acc;
  }
  return out;
}

// Entry F^alpha_{ij} evaluated at f.
template <class S>
typename S::Value error_tensor_entry(Pauli alpha, const std::array<typename S::Value, 4>& f,
                                     Pauli i, Pauli j) {
  return f[pauli_mul(pauli_mul(alpha, i), j)];
}

}  // namespace treecode
