#pragma once

#include <cstdint>
#include <random>

namespace treecode {

// Seeded random stream. Wraps std::mt19937_64 but keeps all value mappings
// (uniform doubles, bounded ints) in-house so that a given seed produces the
// same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (master, stream) via splitmix64.
  static Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(splitmix64(master + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection-free for the sizes used here.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection on the biased band.
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next();
        m = static_cast<unsigned __int128>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace treecode
