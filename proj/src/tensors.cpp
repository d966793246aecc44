#include "treecode/tensors.hpp"

#include <stdexcept>

namespace treecode {

RTensor build_r(const TwoQubitClifford& g) {
  RTensor r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      r.image[i + 4 * j] =
          g.conjugate(PauliPair{static_cast<Pauli>(i), static_cast<Pauli>(j)});
    }
  }
  return r;
}

RtildeTensor build_rtilde(const RTensor& r, Pauli stab) {
  if (stab == kPauliI) {
    throw std::invalid_argument("stabilizer input must be X, Z or Y");
  }
  RtildeTensor rt;
  rt.stab = stab;
  for (int i = 0; i < 4; ++i) {
    PauliPair a = r.at(static_cast<Pauli>(i), kPauliI);
    PauliPair b = r.at(static_cast<Pauli>(i), stab);
    // Canonical order for dedup and stable joins.
    if (b.code() < a.code()) std::swap(a, b);
    rt.pairs[i] = {a, b};
  }
  return rt;
}

RtildeTensor build_rtilde(const TwoQubitClifford& g, Pauli stab) {
  return build_rtilde(build_r(g), stab);
}

std::uint64_t RtildeTensor::key() const {
  std::uint64_t k = 0;
  for (int i = 0; i < 4; ++i) {
    k = (k << 8) | static_cast<std::uint64_t>(pairs[i][0].code());
    k = (k << 8) | static_cast<std::uint64_t>(pairs[i][1].code());
  }
  return k;
}

}  // namespace treecode
