#include "treecode/pauli.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace treecode {

namespace {

constexpr char kPauliChars[4] = {'I', 'X', 'Z', 'Y'};

// Expected commutation of the generators XI, ZI, IX, IZ: XI/ZI anticommute,
// IX/IZ anticommute, everything else commutes.
constexpr int expected_anticommute(int i, int j) {
  return ((i / 2 == j / 2) && i != j) ? 1 : 0;
}

bool images_full_rank(const std::array<PauliPair, 4>& images) {
  // Gaussian elimination over GF(2) on the 4-bit symplectic vectors.
  std::array<std::uint8_t, 4> rows{};
  for (int i = 0; i < 4; ++i) {
    rows[i] = static_cast<std::uint8_t>(
        pauli_x_bit(images[i].left) | (pauli_z_bit(images[i].left) << 1) |
        (pauli_x_bit(images[i].right) << 2) | (pauli_z_bit(images[i].right) << 3));
  }
  int rank = 0;
  for (int bit = 0; bit < 4; ++bit) {
    int pivot = -1;
    for (int r = rank; r < 4; ++r) {
      if (rows[r] & (1 << bit)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < 4; ++r) {
      if (r != rank && (rows[r] & (1 << bit))) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  return rank == 4;
}

}  // namespace

char pauli_char(Pauli p) { return kPauliChars[p & 3]; }

std::optional<Pauli> pauli_from_char(char c) {
  switch (c) {
    case 'I':
    case 'i':
      return kPauliI;
    case 'X':
    case 'x':
      return kPauliX;
    case 'Z':
    case 'z':
      return kPauliZ;
    case 'Y':
    case 'y':
      return kPauliY;
    default:
      return std::nullopt;
  }
}

std::string pauli_pair_str(const PauliPair& p) {
  return std::string{pauli_char(p.left), pauli_char(p.right)};
}

std::optional<PauliPair> pauli_pair_from_str(std::string_view s) {
  if (s.size() != 2) return std::nullopt;
  auto l = pauli_from_char(s[0]);
  auto r = pauli_from_char(s[1]);
  if (!l || !r) return std::nullopt;
  return PauliPair{*l, *r};
}

TwoQubitClifford clifford_from_images(const std::array<PauliPair, 4>& images) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (images[i] == images[j]) {
        throw InvalidGateError(GateDefect::kSingular,
                               "duplicate generator images cannot generate the Pauli group");
      }
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (images[i].anticommute(images[j]) != expected_anticommute(i, j)) {
        throw InvalidGateError(GateDefect::kNonSymplectic,
                               "generator images violate commutation relations");
      }
    }
  }
  if (!images_full_rank(images)) {
    throw InvalidGateError(GateDefect::kSingular,
                           "generator images do not span the two-qubit Pauli group");
  }
  return TwoQubitClifford{images};
}

const std::vector<TwoQubitClifford>& symplectic2_group() {
  static const std::vector<TwoQubitClifford> group = [] {
    std::vector<TwoQubitClifford> out;
    out.reserve(720);
    // Brute force over all image 4-tuples of nonidentity Pauli pairs,
    // keeping the symplectic ones. 15^4 candidates, checked cheaply.
    for (int a = 1; a < 16; ++a) {
      PauliPair ia = PauliPair::from_code(a);
      for (int b = 1; b < 16; ++b) {
        PauliPair ib = PauliPair::from_code(b);
        if (ia.anticommute(ib) != 1) continue;
        for (int c = 1; c < 16; ++c) {
          PauliPair ic = PauliPair::from_code(c);
          if (ic.anticommute(ia) != 0 || ic.anticommute(ib) != 0) continue;
          for (int d = 1; d < 16; ++d) {
            PauliPair id = PauliPair::from_code(d);
            if (id.anticommute(ia) != 0 || id.anticommute(ib) != 0) continue;
            if (ic.anticommute(id) != 1) continue;
            std::array<PauliPair, 4> images{ia, ib, ic, id};
            if (!images_full_rank(images)) continue;
            out.push_back(TwoQubitClifford{images});
          }
        }
      }
    }
    std::sort(out.begin(), out.end(),
              [](const TwoQubitClifford& x, const TwoQubitClifford& y) {
                return x.key() < y.key();
              });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }();
  return group;
}

TwoQubitClifford sample_clifford2(Rng& rng) {
  const auto& group = symplectic2_group();
  return group[rng.index(group.size())];
}

namespace {

TwoQubitClifford make_gate(const char* xi, const char* zi, const char* ix, const char* iz) {
  std::array<PauliPair, 4> images{*pauli_pair_from_str(xi), *pauli_pair_from_str(zi),
                                  *pauli_pair_from_str(ix), *pauli_pair_from_str(iz)};
  return clifford_from_images(images);
}

struct NamedGate {
  const char* name;
  TwoQubitClifford gate;
  Pauli stab;
};

const std::vector<NamedGate>& named_gates() {
  static const std::vector<NamedGate> gates = {
      {"cnot", make_gate("XX", "ZI", "IX", "ZZ"), kPauliZ},
      {"notc", make_gate("XI", "ZZ", "XX", "IZ"), kPauliX},
      {"bell", make_gate("ZZ", "XI", "IZ", "XX"), kPauliZ},
      {"opt152", make_gate("ZZ", "IY", "YY", "ZI"), kPauliX},
      {"v", make_gate("ZX", "IY", "YY", "ZI"), kPauliX},
  };
  return gates;
}

}  // namespace

const TwoQubitClifford& cnot_gate() { return named_gates()[0].gate; }
const TwoQubitClifford& notc_gate() { return named_gates()[1].gate; }
const TwoQubitClifford& bell_gate() { return named_gates()[2].gate; }
const TwoQubitClifford& opt152_gate() { return named_gates()[3].gate; }
const TwoQubitClifford& v_gate() { return named_gates()[4].gate; }

std::optional<TwoQubitClifford> gate_by_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& g : named_gates()) {
    if (lower == g.name) return g.gate;
  }
  return std::nullopt;
}

std::optional<std::string> gate_name(const TwoQubitClifford& g) {
  for (const auto& n : named_gates()) {
    if (n.gate == g) return std::string(n.name);
  }
  return std::nullopt;
}

Pauli default_stab_for(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& g : named_gates()) {
    if (lower == g.name) return g.stab;
  }
  return kPauliZ;
}

TwoQubitClifford parse_gate_spec(std::string_view text) {
  static constexpr std::array<std::string_view, 4> kLhs = {"XI", "ZI", "IX", "IZ"};
  std::array<std::optional<PauliPair>, 4> images;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip whitespace.
    std::string s;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty() || s[0] == '#') continue;
    auto arrow = s.find("->");
    if (arrow == std::string::npos) {
      throw std::runtime_error("gate spec line " + std::to_string(lineno) +
                               ": expected \"PP->PP\"");
    }
    std::string lhs = s.substr(0, arrow);
    std::string rhs = s.substr(arrow + 2);
    auto it = std::find(kLhs.begin(), kLhs.end(), lhs);
    auto img = pauli_pair_from_str(rhs);
    if (it == kLhs.end() || !img) {
      throw std::runtime_error("gate spec line " + std::to_string(lineno) +
                               ": unrecognized Pauli pair");
    }
    images[static_cast<std::size_t>(it - kLhs.begin())] = *img;
  }
  for (int i = 0; i < 4; ++i) {
    if (!images[i]) {
      throw std::runtime_error(std::string("gate spec missing image for ") +
                               std::string(kLhs[i]));
    }
  }
  return clifford_from_images({*images[0], *images[1], *images[2], *images[3]});
}

std::string format_gate_spec(const TwoQubitClifford& g) {
  static constexpr std::array<std::string_view, 4> kLhs = {"XI", "ZI", "IX", "IZ"};
  std::string out;
  for (int i = 0; i < 4; ++i) {
    out += std::string(kLhs[i]) + "->" + pauli_pair_str(g.images[i]) + "\n";
  }
  return out;
}

}  // namespace treecode
