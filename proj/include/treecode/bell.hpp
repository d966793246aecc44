#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treecode/flows.hpp"
#include "treecode/rng.hpp"

namespace treecode {

// ---------------------------------------------------------------------------
// Single-parameter CSS loss flows for the Bell tree under heralded bit and
// phase flips: x0 (z0) is the probability that a logical X (Z) error is
// undetectable. One step covers two layers of the tree (a delocalizer layer
// followed by a copy layer, with bulk heralding after each).
// ---------------------------------------------------------------------------

struct CssLossState {
  double x0 = 0, z0 = 0;
};

// f_{d,q}: a heralded link keeps the value with weight 1-q and resets the
// d = 0 branch with weight q.
inline double herald_mix(double v, double q, bool d_is_zero = true) {
  return (1 - q) * v + (d_is_zero ? q : 0.0);
}

double bell_x0_step(double x0, double q);  // g_q
double bell_z0_step(double z0, double q);
CssLossState bell_css_flow(const CssLossState& s, double q);
double bell_x0_step_derivative(double x0, double q);  // g_q'

std::vector<double> bell_x0_trace(double p, double q, int tau_max);

// L(tau) = (x0(tau) - x0(tau-1)) / (1 - x0(tau-1)); one entry per tau >= 1.
std::vector<double> loss_rate(const std::vector<double>& x0_trace);

// Fixed points of the scalar flows at bulk rate q.
struct BellFixedPoints {
  double q = 0;
  bool coding_exists = false;  // q <= q_c
  double x_s = 0, x_c = 0, x_f = 1;
  double z_s = 0, z_c = 0, z_f = 1;
  double lambda_s = 0, lambda_c = 0;  // g_q' at x_s and x_c
};

BellFixedPoints bell_fixed_points(double q);

// Lone real root of 32 q^3 - 96 q^2 + 96 q - 5 (merge of x_s and x_c).
double bell_qc();
// x value of the marginal fixed point at q = q_c.
double bell_marginal_x();

struct BellPhaseDiagram {
  double q_c = 0;
  std::vector<BellFixedPoints> rows;
};

BellPhaseDiagram bell_phase_diagram(const std::vector<double>& q_values);

// ---------------------------------------------------------------------------
// Conditional X-distance distribution x_d(p, q, tau).
// ---------------------------------------------------------------------------

struct MassLeak : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DistanceDistribution {
  std::vector<double> x;  // x[d] for d = 0..d_max (support-trimmed internally)
  double tail = 0;        // probability mass above d_max
  double p = 0, q = 0;
  int tau = 0;
  std::size_t d_max = 4096;

  double& at(std::size_t d) { return x[d]; }
  double value(std::size_t d) const { return d < x.size() ? x[d] : 0.0; }
  double total() const;
  double x0() const { return x.empty() ? 0.0 : x[0]; }
};

DistanceDistribution initial_distance_distribution(double p, double q,
                                                   std::size_t d_max = 4096);
// One two-layer step; throws MassLeak if normalization drifts.
DistanceDistribution conditional_distance_flow(const DistanceDistribution& dist);

struct DistanceStats {
  double mean_conditional = 0;  // sum d x_d / (1 - x0)
  double mean_unconditional = 0;
  double x0 = 0;
};

DistanceStats distance_stats(const DistanceDistribution& dist);

// Trace of the distribution recursion with running statistics.
struct ConditionalDistanceTrace {
  std::vector<DistanceStats> stats;    // index tau
  std::vector<double> x0;              // loss probability per tau
  std::vector<int> d_peak;             // per tau
  std::vector<DistanceDistribution> snapshots;  // only taus in `keep`
};

ConditionalDistanceTrace run_conditional_distance(double p, double q, int tau_max,
                                                  const std::vector<int>& keep = {},
                                                  std::size_t d_max = 4096);

// Growth rate c(q) of d(q, q, tau) ~ exp(c tau), fitted over a trailing window.
double conditional_distance_growth_rate(double q, int tau_max, int fit_window = 10);

// ---------------------------------------------------------------------------
// Monte Carlo oracle: per-sample tropical contraction over heralded patterns.
// ---------------------------------------------------------------------------

struct ConditionalDistanceSample {
  std::vector<double> x_empirical;  // histogram of d at depth 2*tau
  std::uint64_t samples = 0;
  // Pi(d | d_star): next-step distance distribution given the previous one.
  std::vector<std::vector<std::uint64_t>> pi_counts;  // [d_star][d]
  std::vector<double> bias;                           // delta(d_star)
  std::vector<std::uint64_t> bias_counts;             // N(d_star)
};

ConditionalDistanceSample sample_conditional_distance(int tau, double p, double q,
                                                      std::uint64_t samples,
                                                      std::uint64_t seed,
                                                      int threads = 0);

// Conditional X distance of one explicit heralded pattern on a depth-2*tau
// CNOT/NOTC Bell tree (odd layers from the root are copy nodes). Leaf and
// link heralds are indexed as in TreeSpec; d = 0 means the logical is lost.
std::int64_t bell_pattern_distance(int depth, const std::vector<std::uint8_t>& leaf_heralds,
                                   const std::vector<std::uint8_t>& link_heralds);

// ---------------------------------------------------------------------------
// Maximally balanced erasures.
// ---------------------------------------------------------------------------

struct BalancedOutcome {
  int x0 = 0, z0 = 0;  // deterministic 0/1 outcomes
};

BalancedOutcome balanced_erasure_outcome(std::uint64_t erasures, int tau);
std::uint64_t balanced_threshold_x(int tau);  // (4^tau + 2)/3
std::uint64_t balanced_threshold_z(int tau);  // (2*4^tau + 1)/3
// Thresholds recovered by scanning the recursion; matches the closed forms.
std::uint64_t balanced_threshold_x_recursive(int tau);
std::uint64_t balanced_threshold_z_recursive(int tau);

// ---------------------------------------------------------------------------
// Postselected (trivial-syndrome) ferromagnet.
// ---------------------------------------------------------------------------

struct FerroState {
  double mx = 1, mz = 1;
};

FerroState ferro_flow(const FerroState& m, double q);
double ferro_mx_step(double mx, double q);
double ferro_mz_step(double mz, double q);

double ferro_qfm();  // root of 27 (1-2q)^6 = 16

struct FerroFixedPoints {
  double q = 0;
  bool coding_exists = false;
  double m_s = 0, m_c = 0;        // stable (coding) and critical points of m_x
  double lambda_s = 0, lambda_c = 0;
  double mz_s = 0, mz_c = 0;
};

FerroFixedPoints ferro_fixed_points(double q);

}  // namespace treecode
