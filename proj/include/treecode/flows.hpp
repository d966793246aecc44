#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treecode/tensors.hpp"

namespace treecode {

// Probabilities that, under a heralded pattern, no logical is lost (n), only
// X / Z / Y is undetectable (x, z, y), or everything is lost (a).
struct HeraldedState {
  double n = 1, x = 0, z = 0, y = 0, a = 0;

  double sum() const { return n + x + z + y + a; }
  bool valid(double tol = 1e-12) const;

  // Reduced coordinates (n, x, z, a); y is implied by normalization.
  Eigen::Vector4d reduced() const { return {n, x, z, a}; }
  static HeraldedState from_reduced(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], 1.0 - v.sum(), v[3]};
  }

  // Initial condition of the heralded channel with rates (p_x, p_z, p_y, p_a).
  static HeraldedState from_rates(double px, double pz, double py, double pa) {
    return {1.0 - px - pz - py - pa, px, pz, py, pa};
  }
  static HeraldedState erasure(double p) { return from_rates(0, 0, 0, p); }
  // Independent heralded X and Z errors at rates x0, z0 (CSS product form).
  static HeraldedState css_product(double x0, double z0) {
    return {(1 - x0) * (1 - z0), x0 * (1 - z0), z0 * (1 - x0), 0, x0 * z0};
  }
};

struct SetMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// s(j, k): the flow class produced when the left input is in herald class j
// and the right input in class k. Classes indexed 0..4 = (n, x, z, y, a).
struct PullbackTable {
  std::array<std::array<int, 5>, 5> cls{};
};

PullbackTable pullback_sets(const RtildeTensor& rt);

HeraldedState flow_step(const HeraldedState& pi, const PullbackTable& table);
HeraldedState flow_step(const HeraldedState& pi, const RtildeTensor& rt);

// Ensemble-averaged flow over uniformly random two-qubit Clifford gates.
HeraldedState random_ensemble_flow_step(const HeraldedState& pi);

// Optimal-decoder failure probability and reference-environment mutual
// information as linear functions of the flow variables.
double heralded_failure_probability(const HeraldedState& pi);
double heralded_mutual_information(const HeraldedState& pi);

// A flow on reduced coordinates, together with its exact Jacobian.
struct ReducedFlow {
  std::function<Eigen::Vector4d(const Eigen::Vector4d&)> step;
  std::function<Eigen::Matrix4d(const Eigen::Vector4d&)> jacobian;  // analytic
  int branching = 2;  // qubits per flow step (sets the base of xi_c)
  std::string name;
};

ReducedFlow make_gate_flow(const RtildeTensor& rt, std::string name = "gate");
ReducedFlow make_random_ensemble_flow();

Eigen::Matrix4d finite_difference_jacobian(
    const std::function<Eigen::Vector4d(const Eigen::Vector4d&)>& f,
    const Eigen::Vector4d& at, double step = 1e-6);

enum class Stability { kStable, kUnstable, kMarginal };

struct FixedPointReport {
  Eigen::Vector4d location;  // (n, x, z, a)
  double y = 0;
  std::array<std::complex<double>, 4> eigenvalues{};
  double spectral_radius = 0;
  Stability stability = Stability::kStable;
  int relevant_count = 0;       // eigenvalues with |lambda| > 1
  double xi_c = 0;              // 1/log_B(spectral radius) when unstable
  int branching = 2;
  double residual = 0;          // |flow(pi*) - pi*|_inf
};

struct FixedPointSearch {
  std::vector<FixedPointReport> points;
  int failed_seeds = 0;
};

// Newton iteration on flow(pi) - pi = 0 from a grid of simplex seeds,
// deduplicated; eigenvalues of the Jacobian at each root.
FixedPointSearch find_fixed_points(const ReducedFlow& flow, int grid_per_axis = 7,
                                   double tol = 1e-13);

std::string stability_name(Stability s);

}  // namespace treecode
