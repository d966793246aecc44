#pragma once

#include <cstdint>
#include <optional>

#include "treecode/enumerators.hpp"
#include "treecode/tree.hpp"

namespace treecode {

struct SampleResult {
  double p_fail = 0;
  double stderr_est = 0;  // binomial standard error
  std::uint64_t failures = 0;
  std::uint64_t ties = 0;  // argmax ties, counted as failures
  std::uint64_t samples = 0;
};

// Unbiased failure-probability estimate for the optimal decoder: draws i.i.d.
// error patterns, contracts the tree per pattern, and scores a failure when
// the true logical class is not the unique argmax of the coset probabilities.
// Bulk faults on links are included when `bulk` is set.
SampleResult sample_and_decode(const TreeSpec& spec, const PauliRates& p,
                               const std::optional<PauliRates>& bulk,
                               std::uint64_t samples, std::uint64_t seed,
                               int threads = 0);

// Exact average over all 4^(2^t) surface patterns (t <= 3), using the same
// decode arithmetic as the sampler.
double exhaustive_failure_probability(const TreeSpec& spec, const PauliRates& p);

// Decode a single explicit pattern; returns true on failure. Exposed for the
// exhaustive oracle and tests.
bool decode_fails(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                  const PauliRates& p);

}  // namespace treecode
