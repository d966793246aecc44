#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace treecode {

struct EnumeratorOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unsigned 128-bit counter with overflow-checked arithmetic. Coefficient
// counts scale like 2^(2^t), so 128 bits covers symbolic work through the
// configurable degree cap (t <= 7); anything larger throws.
struct Count128 {
  unsigned __int128 v = 0;

  Count128() = default;
  Count128(std::uint64_t x) : v(x) {}  // NOLINT: implicit by design

  bool operator==(const Count128&) const = default;

  Count128& operator+=(const Count128& o) {
    unsigned __int128 s = v + o.v;
    if (s < v) throw EnumeratorOverflow("enumerator coefficient overflow in +");
    v = s;
    return *this;
  }
  friend Count128 operator+(Count128 a, const Count128& b) { return a += b; }

  friend Count128 operator*(const Count128& a, const Count128& b) {
    if (a.v != 0 && b.v != 0) {
      unsigned __int128 q = ~static_cast<unsigned __int128>(0) / a.v;
      if (b.v > q) throw EnumeratorOverflow("enumerator coefficient overflow in *");
    }
    Count128 r;
    r.v = a.v * b.v;
    return r;
  }

  bool is_zero() const { return v == 0; }
  double to_double() const { return static_cast<double>(v); }
  std::string str() const {
    if (v == 0) return "0";
    std::string out;
    unsigned __int128 x = v;
    while (x > 0) {
      out.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
      x /= 10;
    }
    return {out.rbegin(), out.rend()};
  }
};

// Monomial w^a x^b z^c y^d, exponents packed 16 bits each.
struct Monomial {
  std::uint64_t packed = 0;

  static Monomial make(unsigned w, unsigned x, unsigned z, unsigned y) {
    Monomial m;
    m.packed = (static_cast<std::uint64_t>(w)) | (static_cast<std::uint64_t>(x) << 16) |
               (static_cast<std::uint64_t>(z) << 32) | (static_cast<std::uint64_t>(y) << 48);
    return m;
  }
  unsigned exp(int var) const {
    return static_cast<unsigned>((packed >> (16 * var)) & 0xffff);
  }
  unsigned degree() const { return exp(0) + exp(1) + exp(2) + exp(3); }
  auto operator<=>(const Monomial&) const = default;

  Monomial operator*(const Monomial& o) const {
    for (int v = 0; v < 4; ++v) {
      if (exp(v) + o.exp(v) > 0xffffu) {
        throw EnumeratorOverflow("monomial exponent overflow");
      }
    }
    Monomial m;
    m.packed = packed + o.packed;
    return m;
  }
  std::string str() const;  // e.g. "w^2 x", "1"
};

// Sparse multivariate polynomial in (w, x, z, y) with nonnegative
// 128-bit-checked integer coefficients.
class Poly {
 public:
  Poly() = default;
  static Poly constant(std::uint64_t c) {
    Poly p;
    if (c != 0) p.terms_[Monomial{}] = Count128(c);
    return p;
  }
  static Poly monomial(unsigned w, unsigned x, unsigned z, unsigned y,
                       std::uint64_t coeff = 1) {
    Poly p;
    if (coeff != 0) p.terms_[Monomial::make(w, x, z, y)] = Count128(coeff);
    return p;
  }
  // The four variables, indexed by Pauli code 0..3 = (w, x, z, y).
  static Poly variable(int pauli_code) {
    unsigned e[4] = {0, 0, 0, 0};
    e[pauli_code] = 1;
    return monomial(e[0], e[1], e[2], e[3]);
  }

  bool operator==(const Poly&) const = default;
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Count128>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Count128& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) it->second += c;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        out.add_term(ma * mb, ca * cb);
      }
    }
    return out;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  // Sum of all coefficients (the evaluation at w=x=z=y=1).
  Count128 coefficient_sum() const {
    Count128 s;
    for (const auto& [m, c] : terms_) s += c;
    return s;
  }

  // Evaluation at numeric arguments indexed by Pauli code.
  double eval(const std::array<double, 4>& u) const;

  // Specialize w=1, x=z=y=u and return the coefficients of u^k.
  // Used to read off weight enumerators and distances.
  std::map<unsigned, Count128> weight_profile() const;

  std::string str() const;

 private:
  std::map<Monomial, Count128> terms_;
};

// Semiring abstraction used by the tree contraction. Each instance provides
// a value type with zero/one constants and add/mul operations.

struct ProbSemiring {
  using Value = double;
  static Value zero() { return 0.0; }
  static Value one() { return 1.0; }
  static Value add(Value a, Value b) { return a + b; }
  static Value mul(Value a, Value b) { return a * b; }
};

// Min-plus algebra over naturals with an absorbing infinity.
struct TropSemiring {
  using Value = std::int64_t;
  static constexpr Value kInf = std::numeric_limits<std::int64_t>::max() / 4;
  static Value zero() { return kInf; }
  static Value one() { return 0; }
  static Value add(Value a, Value b) { return a < b ? a : b; }
  static Value mul(Value a, Value b) { return (a >= kInf || b >= kInf) ? kInf : a + b; }
};

struct PolySemiring {
  using Value = Poly;
  static Value zero() { return Poly(); }
  static Value one() { return Poly::constant(1); }
  static Value add(Value a, const Value& b) { return a += b; }
  static Value mul(const Value& a, const Value& b) { return a * b; }
};

// Four-component vector over a semiring, indexed by logical class I,X,Z,Y.
template <class S>
using EnumeratorVec = std::array<typename S::Value, 4>;

using PolyVec = EnumeratorVec<PolySemiring>;
using ProbVec = EnumeratorVec<ProbSemiring>;
using TropVec = EnumeratorVec<TropSemiring>;

}  // namespace treecode
