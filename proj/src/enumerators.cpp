#include "treecode/enumerators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "treecode/distance.hpp"

namespace treecode {

std::string Monomial::str() const {
  static constexpr const char* kVars[4] = {"w", "x", "z", "y"};
  std::string out;
  for (int v = 0; v < 4; ++v) {
    unsigned e = exp(v);
    if (e == 0) continue;
    if (!out.empty()) out += " ";
    out += kVars[v];
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

double Poly::eval(const std::array<double, 4>& u) const {
  double acc = 0;
  for (const auto& [m, c] : terms_) {
    double term = c.to_double();
    for (int v = 0; v < 4; ++v) {
      term *= std::pow(u[v], static_cast<int>(m.exp(v)));
    }
    acc += term;
  }
  return acc;
}

std::map<unsigned, Count128> Poly::weight_profile() const {
  std::map<unsigned, Count128> out;
  for (const auto& [m, c] : terms_) {
    unsigned weight = m.exp(1) + m.exp(2) + m.exp(3);
    auto [it, inserted] = out.emplace(weight, c);
    if (!inserted) it->second += c;
  }
  return out;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    std::string ms = m.str();
    if (c == Count128(1) && ms != "1") {
      out += ms;
    } else if (ms == "1") {
      out += c.str();
    } else {
      out += c.str() + " " + ms;
    }
  }
  return out;
}

int CosetProbs::argmax() const {
  return static_cast<int>(std::max_element(eta.begin(), eta.end()) - eta.begin());
}

bool CosetProbs::argmax_tied() const {
  int best = argmax();
  for (int i = 0; i < 4; ++i) {
    if (i != best && eta[i] == eta[best]) return true;
  }
  return false;
}

PolyVec symbolic_enumerator(const TreeSpec& spec) {
  auto leaf = [](std::size_t) -> PolyVec {
    return {Poly::variable(0), Poly::variable(1), Poly::variable(2), Poly::variable(3)};
  };
  return contract_tree<PolySemiring>(spec, leaf, no_insertions<PolySemiring>());
}

PolyVec symbolic_coset_enumerator(const TreeSpec& spec, const std::vector<Pauli>& error) {
  if (error.size() != spec.leaf_count()) {
    throw std::invalid_argument("error string length must equal leaf count");
  }
  auto leaf = [&](std::size_t i) -> PolyVec {
    // F^alpha contracted with e_I from below: component j is f_{alpha+j}.
    Pauli alpha = error[i];
    PolyVec v;
    for (int j = 0; j < 4; ++j) {
      v[j] = Poly::variable(pauli_mul(alpha, static_cast<Pauli>(j)));
    }
    return v;
  };
  return contract_tree<PolySemiring>(spec, leaf, no_insertions<PolySemiring>());
}

namespace {

// Probability-semiring contraction with per-node renormalization to avoid
// underflow at large depth (probabilities scale like p^(2^t)). The returned
// vector is normalized to sum 1.
CosetProbs contract_probs(const TreeSpec& spec,
                          const std::function<ProbVec(std::size_t)>& leaf,
                          const std::function<const LinkInsertion<ProbSemiring>*(std::size_t)>& link) {
  auto rec = [&](auto&& self, int layer, std::size_t idx) -> ProbVec {
    if (layer == spec.depth) return leaf(idx);
    const NodeSpec& n = spec.node(layer, idx);
    RtildeTensor rt = build_rtilde(n.gate, n.stab);
    ProbVec l = self(self, layer + 1, 2 * idx);
    ProbVec r = self(self, layer + 1, 2 * idx + 1);
    ProbVec u = rt.join<ProbSemiring>(l, r);
    if (const auto* ins = link(TreeSpec::flat_index(layer, idx))) {
      u = apply_error_tensor<ProbSemiring>(ins->alpha, ins->f, u);
    }
    double total = u[0] + u[1] + u[2] + u[3];
    if (total > 0) {
      for (double& v : u) v /= total;
    }
    return u;
  };
  ProbVec out = rec(rec, 0, 0);
  double total = out[0] + out[1] + out[2] + out[3];
  if (!(total > 0)) {
    throw DegenerateSyndrome("all four coset components vanished");
  }
  CosetProbs probs;
  for (int i = 0; i < 4; ++i) probs.eta[i] = out[i] / total;
  return probs;
}

}  // namespace

CosetProbs coset_probs(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                       const PauliRates& p) {
  return coset_probs(spec, surface_error, p, PauliRates{}, {});
}

CosetProbs coset_probs(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                       const PauliRates& p, const PauliRates& q,
                       const std::vector<Pauli>& bulk_fault) {
  if (surface_error.size() != spec.leaf_count()) {
    throw std::invalid_argument("error string length must equal leaf count");
  }
  if (!bulk_fault.empty() && bulk_fault.size() != spec.node_count()) {
    throw std::invalid_argument("bulk fault must give one Pauli per node output");
  }
  if (p.total() >= 1.0 || q.total() >= 1.0) {
    throw std::invalid_argument("Pauli rates must sum below 1");
  }
  std::array<double, 4> fp = p.f_vector();
  std::array<double, 4> fq = q.f_vector();
  bool bulk_on = !bulk_fault.empty() && q.total() > 0;
  // With a bulk channel present, canonical faults on links still need the
  // insertion tensors even when the drawn Pauli is I.
  bool any_bulk = !bulk_fault.empty();

  std::vector<LinkInsertion<ProbSemiring>> insertions;
  if (any_bulk) {
    insertions.resize(spec.node_count());
    for (std::size_t k = 0; k < spec.node_count(); ++k) {
      insertions[k] = LinkInsertion<ProbSemiring>{bulk_fault[k], fq};
    }
  }
  (void)bulk_on;

  auto leaf = [&](std::size_t i) -> ProbVec {
    Pauli alpha = surface_error[i];
    ProbVec v;
    for (int j = 0; j < 4; ++j) v[j] = fp[pauli_mul(alpha, static_cast<Pauli>(j))];
    return v;
  };
  auto link = [&](std::size_t k) -> const LinkInsertion<ProbSemiring>* {
    return any_bulk ? &insertions[k] : nullptr;
  };
  return contract_probs(spec, leaf, link);
}

PolyVec level1_enumerator(const RtildeTensor& rt) {
  PolyVec u{Poly::variable(0), Poly::variable(1), Poly::variable(2), Poly::variable(3)};
  return rt.join<PolySemiring>(u, u);
}

namespace {

Poly poly_pow(const Poly& base, unsigned e) {
  Poly out = Poly::constant(1);
  for (unsigned k = 0; k < e; ++k) out = out * base;
  return out;
}

}  // namespace

PolyVec recursion_step_a(const PolyVec& level1, const PolyVec& prev, unsigned degree_cap) {
  PolyVec out;
  for (int i = 0; i < 4; ++i) {
    Poly acc;
    for (const auto& [m, c] : level1[i].terms()) {
      Poly term = Poly::constant(1);
      for (int v = 0; v < 4; ++v) {
        unsigned e = m.exp(v);
        if (e > 0) term = term * poly_pow(prev[v], e);
      }
      for (const auto& [tm, tc] : term.terms()) {
        acc.add_term(tm, tc * c);
      }
    }
    if (acc.degree() > degree_cap) {
      throw DegreeOverflow("enumerator degree " + std::to_string(acc.degree()) +
                           " exceeds cap " + std::to_string(degree_cap));
    }
    out[i] = acc;
  }
  return out;
}

namespace {

// Writes the propagated image of `p`, entering node (layer, idx) on its left
// leg, into the leaf window of that subtree.
void propagate(const TreeSpec& spec, int layer, std::size_t idx, Pauli p,
               std::vector<Pauli>& leaves) {
  if (p == kPauliI) return;
  if (layer == spec.depth) {
    leaves[idx] = pauli_mul(leaves[idx], p);
    return;
  }
  const NodeSpec& n = spec.node(layer, idx);
  PauliPair out = n.gate.conjugate(PauliPair{p, kPauliI});
  propagate(spec, layer + 1, 2 * idx, out.left, leaves);
  propagate(spec, layer + 1, 2 * idx + 1, out.right, leaves);
}

std::vector<Pauli> propagate_from_root(const TreeSpec& spec, Pauli p) {
  std::vector<Pauli> leaves(spec.leaf_count(), kPauliI);
  propagate(spec, 0, 0, p, leaves);
  return leaves;
}

// Stabilizer generator of node (layer, idx): the stabilizer input conjugated
// through the gate, then propagated to the leaves.
std::vector<Pauli> node_generator(const TreeSpec& spec, int layer, std::size_t idx) {
  std::vector<Pauli> leaves(spec.leaf_count(), kPauliI);
  const NodeSpec& n = spec.node(layer, idx);
  PauliPair out = n.gate.conjugate(PauliPair{kPauliI, n.stab});
  propagate(spec, layer + 1, 2 * idx, out.left, leaves);
  propagate(spec, layer + 1, 2 * idx + 1, out.right, leaves);
  return leaves;
}

void mul_into(std::vector<Pauli>& acc, const std::vector<Pauli>& e) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = pauli_mul(acc[i], e[i]);
}

}  // namespace

BruteForceCode brute_force_code(const TreeSpec& spec) {
  if (spec.depth > 4) {
    throw std::invalid_argument("brute-force oracle is limited to depth <= 4");
  }
  BruteForceCode code;
  std::vector<std::vector<Pauli>> generators;
  for (int layer = 0; layer < spec.depth; ++layer) {
    std::size_t width = std::size_t{1} << layer;
    for (std::size_t i = 0; i < width; ++i) {
      generators.push_back(node_generator(spec, layer, i));
    }
  }
  // Enumerate all subset products via Gray code.
  std::size_t n_gen = generators.size();
  std::size_t n_elem = std::size_t{1} << n_gen;
  code.stabilizer_group.reserve(n_elem);
  std::vector<Pauli> current(spec.leaf_count(), kPauliI);
  code.stabilizer_group.push_back(current);
  for (std::size_t g = 1; g < n_elem; ++g) {
    int flip = std::countr_zero(g);
    mul_into(current, generators[static_cast<std::size_t>(flip)]);
    code.stabilizer_group.push_back(current);
  }
  code.logicals[0] = propagate_from_root(spec, kPauliX);
  code.logicals[1] = propagate_from_root(spec, kPauliZ);
  code.logicals[2] = propagate_from_root(spec, kPauliY);
  return code;
}

PolyVec brute_force_coset_enumerator(const TreeSpec& spec, const std::vector<Pauli>& error) {
  if (error.size() != spec.leaf_count()) {
    throw std::invalid_argument("error string length must equal leaf count");
  }
  BruteForceCode code = brute_force_code(spec);
  PolyVec out{Poly(), Poly(), Poly(), Poly()};
  for (int cls = 0; cls < 4; ++cls) {
    std::vector<Pauli> base = error;
    if (cls > 0) mul_into(base, code.logicals[cls - 1]);
    for (const auto& s : code.stabilizer_group) {
      unsigned counts[4] = {0, 0, 0, 0};
      for (std::size_t i = 0; i < base.size(); ++i) {
        ++counts[pauli_mul(base[i], s[i])];
      }
      out[cls].add_term(Monomial::make(counts[0], counts[1], counts[2], counts[3]),
                        Count128(1));
    }
  }
  return out;
}

namespace {

std::string poly_vec_key(const PolyVec& v) {
  std::string key;
  for (const auto& p : v) {
    key += p.str();
    key += ";";
  }
  return key;
}

// Canonical key under simultaneous permutations of the labels (X, Z, Y)
// applied to both variables and vector components.
std::string poly_vec_key_up_to_permutation(const PolyVec& v) {
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {{
      {1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1},
  }};
  std::string best;
  for (const auto& perm : kPerms) {
    // perm maps old label k (1..3) to new label perm[k-1].
    PolyVec permuted;
    permuted[0] = Poly();
    for (int i = 0; i < 4; ++i) {
      int target = (i == 0) ? 0 : perm[i - 1];
      Poly moved;
      for (const auto& [m, c] : v[i].terms()) {
        unsigned e[4] = {m.exp(0), 0, 0, 0};
        for (int var = 1; var < 4; ++var) e[perm[var - 1]] = m.exp(var);
        moved.add_term(Monomial::make(e[0], e[1], e[2], e[3]), c);
      }
      permuted[target] = moved;
    }
    std::string key = poly_vec_key(permuted);
    if (best.empty() || key < best) best = key;
  }
  return best;
}

}  // namespace

Level1Classification classify_level1() {
  Level1Classification result;
  std::map<std::string, std::size_t> seen;
  std::map<std::string, int> seen_perm;
  for (const auto& gate : symplectic2_group()) {
    RTensor r = build_r(gate);
    for (Pauli stab : {kPauliX, kPauliZ, kPauliY}) {
      RtildeTensor rt = build_rtilde(r, stab);
      PolyVec a1 = level1_enumerator(rt);
      std::string key = poly_vec_key(a1);
      auto [it, inserted] = seen.emplace(key, result.classes.size());
      if (inserted) {
        Level1Class cls;
        cls.enumerator = a1;
        cls.count = 1;
        cls.representative = gate;
        cls.stab = stab;
        result.classes.push_back(std::move(cls));
      } else {
        ++result.classes[it->second].count;
      }
      ++seen_perm[poly_vec_key_up_to_permutation(a1)];
    }
  }
  result.class_count_up_to_permutation = static_cast<int>(seen_perm.size());
  for (auto& cls : result.classes) {
    RtildeTensor rt = build_rtilde(cls.representative, cls.stab);
    auto seq = distance_sequence(rt, 20);
    cls.d20 = distance_of(seq.back());
    cls.exponential_distance = cls.d20 >= 100;
  }
  std::sort(result.classes.begin(), result.classes.end(),
            [](const Level1Class& a, const Level1Class& b) { return a.d20 > b.d20; });
  return result;
}

}  // namespace treecode
