#include "treecode/flows.hpp"

#include <cmath>

namespace treecode {

bool HeraldedState::valid(double tol) const {
  auto ok = [tol](double v) { return v >= -tol && v <= 1 + tol; };
  return ok(n) && ok(x) && ok(z) && ok(y) && ok(a) && std::abs(sum() - 1.0) <= 1e4 * tol;
}

namespace {

// Herald classes (n, x, z, y, a) as subsets of reachable Paulis.
constexpr std::array<std::uint8_t, 5> kClassMask = {
    0b0001,  // n: {I}
    0b0011,  // x: {I, X}
    0b0101,  // z: {I, Z}
    0b1001,  // y: {I, Y}
    0b1111,  // a: all
};

int class_from_mask(std::uint8_t mask) {
  for (int c = 0; c < 5; ++c) {
    if (kClassMask[c] == mask) return c;
  }
  return -1;
}

}  // namespace

PullbackTable pullback_sets(const RtildeTensor& rt) {
  PullbackTable table;
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < 5; ++k) {
      std::uint8_t reach = 0;
      for (int alpha = 0; alpha < 4; ++alpha) {
        if (!(kClassMask[j] & (1 << alpha))) continue;
        for (int beta = 0; beta < 4; ++beta) {
          if (!(kClassMask[k] & (1 << beta))) continue;
          PauliPair p{static_cast<Pauli>(alpha), static_cast<Pauli>(beta)};
          for (int i = 0; i < 4; ++i) {
            if (rt.pairs[i][0] == p || rt.pairs[i][1] == p) {
              reach |= static_cast<std::uint8_t>(1 << i);
            }
          }
        }
      }
      int cls = class_from_mask(reach);
      if (cls < 0) {
        throw SetMismatch("pullback of classes (" + std::to_string(j) + "," +
                          std::to_string(k) + ") is not a herald class");
      }
      table.cls[j][k] = cls;
    }
  }
  return table;
}

HeraldedState flow_step(const HeraldedState& pi, const PullbackTable& table) {
  std::array<double, 5> in{pi.n, pi.x, pi.z, pi.y, pi.a};
  std::array<double, 5> out{};
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < 5; ++k) {
      out[table.cls[j][k]] += in[j] * in[k];
    }
  }
  return {out[0], out[1], out[2], out[3], out[4]};
}

HeraldedState flow_step(const HeraldedState& pi, const RtildeTensor& rt) {
  return flow_step(pi, pullback_sets(rt));
}

HeraldedState random_ensemble_flow_step(const HeraldedState& pi) {
  double n = pi.n, a = pi.a;
  HeraldedState out;
  out.n = n * (6 - n - 4 * a) / 5;
  out.a = a * (6 - a - 4 * n) / 5;
  double sym = (5 + a * (a - 6) + n * (n - 6) + 8 * n * a) / 15;
  out.x = out.z = out.y = sym;
  return out;
}

double heralded_failure_probability(const HeraldedState& pi) {
  return (pi.x + pi.y + pi.z) / 2 + 3 * pi.a / 4;
}

double heralded_mutual_information(const HeraldedState& pi) {
  return pi.x + pi.y + pi.z + 2 * pi.a;
}

namespace {

// Map between reduced coordinate slots (n, x, z, a) and full class indices.
constexpr std::array<int, 4> kReducedToFull = {0, 1, 2, 4};

}  // namespace

ReducedFlow make_gate_flow(const RtildeTensor& rt, std::string name) {
  PullbackTable table = pullback_sets(rt);
  ReducedFlow flow;
  flow.name = std::move(name);
  flow.branching = 2;
  flow.step = [table](const Eigen::Vector4d& v) {
    HeraldedState pi = HeraldedState::from_reduced(v);
    return flow_step(pi, table).reduced();
  };
  flow.jacobian = [table](const Eigen::Vector4d& v) {
    // pi'_i = sum_{jk} pi_j pi_k [cls(j,k) = i]; with y eliminated, the
    // derivative w.r.t. a reduced slot is (d/d pi_m - d/d pi_y).
    HeraldedState pi = HeraldedState::from_reduced(v);
    std::array<double, 5> in{pi.n, pi.x, pi.z, pi.y, pi.a};
    Eigen::Matrix<double, 5, 5> full = Eigen::Matrix<double, 5, 5>::Zero();
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        int i = table.cls[j][k];
        full(i, j) += in[k];
        full(i, k) += in[j];
      }
    }
    Eigen::Matrix4d jac;
    for (int r = 0; r < 4; ++r) {
      for (int s = 0; s < 4; ++s) {
        jac(r, s) = full(kReducedToFull[r], kReducedToFull[s]) - full(kReducedToFull[r], 3);
      }
    }
    return jac;
  };
  return flow;
}

ReducedFlow make_random_ensemble_flow() {
  ReducedFlow flow;
  flow.name = "random-ensemble";
  flow.branching = 2;
  flow.step = [](const Eigen::Vector4d& v) {
    HeraldedState pi = HeraldedState::from_reduced(v);
    return random_ensemble_flow_step(pi).reduced();
  };
  flow.jacobian = [](const Eigen::Vector4d& v) {
    double n = v[0], a = v[3];
    Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
    // n' and a' depend only on (n, a); x' = z' = y' likewise.
    jac(0, 0) = (6 - 2 * n - 4 * a) / 5;
    jac(0, 3) = -4 * n / 5;
    jac(3, 0) = -4 * a / 5;
    jac(3, 3) = (6 - 2 * a - 4 * n) / 5;
    double dx_dn = (2 * n - 6 + 8 * a) / 15;
    double dx_da = (2 * a - 6 + 8 * n) / 15;
    jac(1, 0) = jac(2, 0) = dx_dn;
    jac(1, 3) = jac(2, 3) = dx_da;
    return jac;
  };
  return flow;
}

Eigen::Matrix4d finite_difference_jacobian(
    const std::function<Eigen::Vector4d(const Eigen::Vector4d&)>& f,
    const Eigen::Vector4d& at, double step) {
  Eigen::Matrix4d jac;
  for (int s = 0; s < 4; ++s) {
    Eigen::Vector4d hi = at, lo = at;
    hi[s] += step;
    lo[s] -= step;
    jac.col(s) = (f(hi) - f(lo)) / (2 * step);
  }
  return jac;
}

std::string stability_name(Stability s) {
  switch (s) {
    case Stability::kStable:
      return "stable";
    case Stability::kUnstable:
      return "unstable";
    case Stability::kMarginal:
      return "marginal";
  }
  return "?";
}

FixedPointSearch find_fixed_points(const ReducedFlow& flow, int grid_per_axis, double tol) {
  FixedPointSearch result;
  constexpr double kMarginalTol = 1e-7;

  auto residual_of = [&](const Eigen::Vector4d& v) {
    return (flow.step(v) - v).lpNorm<Eigen::Infinity>();
  };

  auto try_seed = [&](Eigen::Vector4d v) -> bool {
    double res = residual_of(v);
    for (int it = 0; it < 200 && res > tol; ++it) {
      Eigen::Matrix4d m = flow.jacobian(v) - Eigen::Matrix4d::Identity();
      Eigen::Vector4d rhs = -(flow.step(v) - v);
      // Least-squares solve tolerates the near-singular Jacobian at a
      // marginal merge; damped acceptance keeps the iteration stable.
      Eigen::Vector4d delta = m.completeOrthogonalDecomposition().solve(rhs);
      if (!delta.allFinite()) return false;
      double scale = 1.0;
      bool accepted = false;
      for (int back = 0; back < 30; ++back) {
        Eigen::Vector4d cand = v + scale * delta;
        double cand_res = residual_of(cand);
        if (cand_res < res || (back == 0 && cand_res <= res * (1 + 1e-12))) {
          v = cand;
          res = cand_res;
          accepted = true;
          break;
        }
        scale *= 0.5;
      }
      if (!accepted) return false;
    }
    if (res > tol) return false;

    double y = 1.0 - v.sum();
    const double eps = 1e-8;
    if (v.minCoeff() < -eps || y < -eps || v.maxCoeff() > 1 + eps) return false;

    for (const auto& p : result.points) {
      if ((p.location - v).lpNorm<Eigen::Infinity>() < 1e-8) return true;
    }

    FixedPointReport rep;
    rep.location = v;
    rep.y = y;
    rep.residual = res;
    rep.branching = flow.branching;
    Eigen::EigenSolver<Eigen::Matrix4d> solver(flow.jacobian(v));
    rep.spectral_radius = 0;
    for (int k = 0; k < 4; ++k) {
      rep.eigenvalues[k] = solver.eigenvalues()(k);
      double mag = std::abs(rep.eigenvalues[k]);
      rep.spectral_radius = std::max(rep.spectral_radius, mag);
      if (mag > 1 + kMarginalTol) ++rep.relevant_count;
    }
    if (rep.spectral_radius > 1 + kMarginalTol) {
      rep.stability = Stability::kUnstable;
      // xi_c = 1/log_B(lambda) with B the per-step branching factor.
      rep.xi_c = std::log2(static_cast<double>(flow.branching)) /
                 std::log2(rep.spectral_radius);
    } else if (rep.spectral_radius < 1 - kMarginalTol) {
      rep.stability = Stability::kStable;
    } else {
      rep.stability = Stability::kMarginal;
    }
    result.points.push_back(rep);
    return true;
  };

  int g = std::max(2, grid_per_axis);
  for (int i0 = 0; i0 < g; ++i0) {
    for (int i1 = 0; i1 < g; ++i1) {
      for (int i2 = 0; i2 < g; ++i2) {
        for (int i3 = 0; i3 < g; ++i3) {
          Eigen::Vector4d v(double(i0) / (g - 1), double(i1) / (g - 1),
                            double(i2) / (g - 1), double(i3) / (g - 1));
          if (v.sum() > 1 + 1e-12) continue;
          if (!try_seed(v)) ++result.failed_seeds;
        }
      }
    }
  }
  std::sort(result.points.begin(), result.points.end(),
            [](const FixedPointReport& a, const FixedPointReport& b) {
              return a.location[0] > b.location[0];
            });
  return result;
}

}  // namespace treecode
