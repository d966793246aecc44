#include "doctest.h"

#include <map>
#include <set>

#include "treecode/pauli.hpp"
#include "treecode/rng.hpp"

using namespace treecode;

TEST_CASE("pauli_mul is the Klein four-group") {
  CHECK(pauli_mul(kPauliX, kPauliZ) == kPauliY);
  for (Pauli k = 0; k < 4; ++k) {
    CHECK(pauli_mul(kPauliI, k) == k);
    CHECK(pauli_mul(k, k) == kPauliI);
  }
  CHECK(pauli_mul(kPauliY, kPauliY) == kPauliI);
  for (Pauli a = 0; a < 4; ++a) {
    for (Pauli b = 0; b < 4; ++b) {
      CHECK(pauli_mul(a, b) == pauli_mul(b, a));
      for (Pauli c = 0; c < 4; ++c) {
        CHECK(pauli_mul(pauli_mul(a, b), c) == pauli_mul(a, pauli_mul(b, c)));
      }
    }
  }
}

TEST_CASE("anticommutation matches the symplectic form") {
  CHECK(pauli_anticommute(kPauliX, kPauliZ) == 1);
  CHECK(pauli_anticommute(kPauliX, kPauliY) == 1);
  CHECK(pauli_anticommute(kPauliZ, kPauliY) == 1);
  CHECK(pauli_anticommute(kPauliX, kPauliX) == 0);
  for (Pauli k = 0; k < 4; ++k) CHECK(pauli_anticommute(kPauliI, k) == 0);
}

TEST_CASE("named gate conjugation") {
  const auto& cnot = cnot_gate();
  CHECK(cnot.conjugate({kPauliX, kPauliI}) == PauliPair{kPauliX, kPauliX});
  CHECK(cnot.conjugate({kPauliI, kPauliZ}) == PauliPair{kPauliZ, kPauliZ});
  CHECK(cnot.conjugate({kPauliZ, kPauliI}) == PauliPair{kPauliZ, kPauliI});
  // NOTC leaves XI alone.
  CHECK(notc_gate().conjugate({kPauliX, kPauliI}) == PauliPair{kPauliX, kPauliI});
}

TEST_CASE("conjugation is a group automorphism") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    TwoQubitClifford g = sample_clifford2(rng);
    PauliPair p = PauliPair::from_code(static_cast<int>(rng.below(16)));
    PauliPair q = PauliPair::from_code(static_cast<int>(rng.below(16)));
    CHECK(g.conjugate(p.mul(q)) == g.conjugate(p).mul(g.conjugate(q)));
  }
}

TEST_CASE("clifford_from_images validation") {
  CHECK_NOTHROW(clifford_from_images(cnot_gate().images));

  // Duplicate images: not invertible.
  auto dup = cnot_gate().images;
  dup[1] = dup[0];
  CHECK_THROWS_AS(clifford_from_images(dup), InvalidGateError);
  try {
    clifford_from_images(dup);
  } catch (const InvalidGateError& e) {
    CHECK(e.defect == GateDefect::kSingular);
  }

  // XI -> XI, ZI -> XX, IX -> IX, IZ -> IZ: breaks the symplectic form.
  std::array<PauliPair, 4> bad{*pauli_pair_from_str("XI"), *pauli_pair_from_str("XX"),
                               *pauli_pair_from_str("IX"), *pauli_pair_from_str("IZ")};
  try {
    clifford_from_images(bad);
    CHECK(false);
  } catch (const InvalidGateError& e) {
    CHECK(e.defect == GateDefect::kNonSymplectic);
  }
}

TEST_CASE("symplectic group has exactly 720 elements") {
  const auto& group = symplectic2_group();
  CHECK(group.size() == 720);

  std::set<std::uint32_t> keys;
  for (const auto& g : group) {
    keys.insert(g.key());
    CHECK_NOTHROW(clifford_from_images(g.images));
  }
  CHECK(keys.size() == 720);
  CHECK(keys.count(cnot_gate().key()) == 1);
  CHECK(keys.count(bell_gate().key()) == 1);
  CHECK(keys.count(opt152_gate().key()) == 1);
}

TEST_CASE("commutation is preserved for all gates and generator pairs") {
  for (const auto& g : symplectic2_group()) {
    for (int a = 0; a < 16; ++a) {
      for (int b = a + 1; b < 16; ++b) {
        PauliPair pa = PauliPair::from_code(a);
        PauliPair pb = PauliPair::from_code(b);
        CHECK(g.conjugate(pa).anticommute(g.conjugate(pb)) == pa.anticommute(pb));
      }
    }
  }
}

TEST_CASE("sample_clifford2 is reproducible and roughly uniform") {
  Rng rng1(42), rng2(42);
  for (int k = 0; k < 10; ++k) {
    CHECK(sample_clifford2(rng1) == sample_clifford2(rng2));
  }

  // Chi-squared uniformity over the 720 classes, 720k draws.
  std::map<std::uint32_t, int> index;
  const auto& group = symplectic2_group();
  for (std::size_t i = 0; i < group.size(); ++i) index[group[i].key()] = static_cast<int>(i);
  std::vector<int> counts(group.size(), 0);
  Rng rng(123);
  const int n = 720000;
  for (int k = 0; k < n; ++k) ++counts[index[sample_clifford2(rng).key()]];
  double expected = static_cast<double>(n) / group.size();
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 719 dof: 1% two-sided bounds are far from these.
  CHECK(chi2 > 550.0);
  CHECK(chi2 < 920.0);
}

TEST_CASE("gate spec text format round-trips") {
  std::string text = format_gate_spec(opt152_gate());
  TwoQubitClifford parsed = parse_gate_spec(text);
  CHECK(parsed == opt152_gate());
  CHECK(gate_name(parsed).value() == "opt152");
  CHECK_THROWS(parse_gate_spec("XI->XQ\n"));
  CHECK_THROWS(parse_gate_spec("XI->XX\n"));  // missing images
}
