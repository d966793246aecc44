#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treecode/rng.hpp"

namespace treecode {

// Single-qubit Pauli modulo phase, two-bit symplectic encoding:
// code = x_bit + 2*z_bit, so 0=I, 1=X, 2=Z, 3=Y. Note the Z/Y ordering.
using Pauli = std::uint8_t;

inline constexpr Pauli kPauliI = 0;
inline constexpr Pauli kPauliX = 1;
inline constexpr Pauli kPauliZ = 2;
inline constexpr Pauli kPauliY = 3;

constexpr Pauli pauli_mul(Pauli a, Pauli b) { return static_cast<Pauli>(a ^ b); }
constexpr int pauli_x_bit(Pauli p) { return p & 1; }
constexpr int pauli_z_bit(Pauli p) { return (p >> 1) & 1; }

// 1 if the two Paulis anticommute, 0 otherwise (symplectic form).
constexpr int pauli_anticommute(Pauli a, Pauli b) {
  return (pauli_x_bit(a) * pauli_z_bit(b) + pauli_z_bit(a) * pauli_x_bit(b)) & 1;
}

char pauli_char(Pauli p);
std::optional<Pauli> pauli_from_char(char c);

// Two-qubit Pauli string modulo phase.
struct PauliPair {
  Pauli left = kPauliI;
  Pauli right = kPauliI;

  constexpr bool operator==(const PauliPair&) const = default;
  constexpr PauliPair mul(const PauliPair& o) const {
    return {pauli_mul(left, o.left), pauli_mul(right, o.right)};
  }
  // 1 if the two strings anticommute.
  constexpr int anticommute(const PauliPair& o) const {
    return (pauli_anticommute(left, o.left) + pauli_anticommute(right, o.right)) & 1;
  }
  // Dense index in [0, 16): left + 4*right.
  constexpr int code() const { return left + 4 * right; }
  static constexpr PauliPair from_code(int c) {
    return {static_cast<Pauli>(c & 3), static_cast<Pauli>((c >> 2) & 3)};
  }
};

std::string pauli_pair_str(const PauliPair& p);
std::optional<PauliPair> pauli_pair_from_str(std::string_view s);

enum class GateDefect {
  kSingular,       // images do not generate the two-qubit Pauli group
  kNonSymplectic,  // images violate the generator commutation relations
};

struct InvalidGateError : std::runtime_error {
  InvalidGateError(GateDefect d, const std::string& what)
      : std::runtime_error(what), defect(d) {}
  GateDefect defect;
};

// Two-qubit Clifford gate identified with its unsigned symplectic action:
// the images of the generators XI, ZI, IX, IZ under conjugation.
struct TwoQubitClifford {
  std::array<PauliPair, 4> images{};  // order: XI, ZI, IX, IZ

  bool operator==(const TwoQubitClifford&) const = default;

  // Unsigned image of p under conjugation, composed from the generator images.
  PauliPair conjugate(const PauliPair& p) const {
    PauliPair out;
    if (pauli_x_bit(p.left)) out = out.mul(images[0]);
    if (pauli_z_bit(p.left)) out = out.mul(images[1]);
    if (pauli_x_bit(p.right)) out = out.mul(images[2]);
    if (pauli_z_bit(p.right)) out = out.mul(images[3]);
    return out;
  }

  // Dense key for ordering and hashing.
  std::uint32_t key() const {
    return static_cast<std::uint32_t>(images[0].code()) |
           (static_cast<std::uint32_t>(images[1].code()) << 4) |
           (static_cast<std::uint32_t>(images[2].code()) << 8) |
           (static_cast<std::uint32_t>(images[3].code()) << 12);
  }
};

// Validates the image table. Throws InvalidGateError on failure.
TwoQubitClifford clifford_from_images(const std::array<PauliPair, 4>& images);

// The complete set of unsigned two-qubit Clifford actions, |Sp(4,2)| = 720,
// in a deterministic order. Built once, then cached.
const std::vector<TwoQubitClifford>& symplectic2_group();

// Uniform draw from the 720-element group.
TwoQubitClifford sample_clifford2(Rng& rng);

// Named gate library. Names: cnot, notc, bell, opt152, v.
const TwoQubitClifford& cnot_gate();
const TwoQubitClifford& notc_gate();
const TwoQubitClifford& bell_gate();    // (H(x)H) CNOT
const TwoQubitClifford& opt152_gate();  // (1(x)Rx[pi/2]) iSWAP
const TwoQubitClifford& v_gate();       // (1(x)R_{(1,1,1)}[-pi/3]) iSWAP
std::optional<TwoQubitClifford> gate_by_name(std::string_view name);
// Returns the library name of a gate, or nullopt if it is not a named gate.
std::optional<std::string> gate_name(const TwoQubitClifford& g);
// Default stabilizer input associated with each named gate.
Pauli default_stab_for(std::string_view name);

// Parses the four-line text format "XI->..", "ZI->..", "IX->..", "IZ->..".
TwoQubitClifford parse_gate_spec(std::string_view text);
std::string format_gate_spec(const TwoQubitClifford& g);

}  // namespace treecode
