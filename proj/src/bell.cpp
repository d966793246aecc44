#include "treecode/bell.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "treecode/fit.hpp"
#include "treecode/tree.hpp"

namespace treecode {

double bell_x0_step(double x0, double q) {
  double u = herald_mix(2 * x0 - x0 * x0, q);
  return herald_mix(u * u, q);
}

double bell_z0_step(double z0, double q) {
  double u = herald_mix(z0 * z0, q);
  return herald_mix(2 * u - u * u, q);
}

CssLossState bell_css_flow(const CssLossState& s, double q) {
  return {bell_x0_step(s.x0, q), bell_z0_step(s.z0, q)};
}

double bell_x0_step_derivative(double x0, double q) {
  double u = herald_mix(2 * x0 - x0 * x0, q);
  return 2 * (1 - q) * (1 - q) * u * (2 - 2 * x0);
}

std::vector<double> bell_x0_trace(double p, double q, int tau_max) {
  std::vector<double> trace;
  trace.reserve(tau_max + 1);
  trace.push_back(p);
  for (int tau = 0; tau < tau_max; ++tau) {
    trace.push_back(bell_x0_step(trace.back(), q));
  }
  return trace;
}

std::vector<double> loss_rate(const std::vector<double>& x0_trace) {
  std::vector<double> out;
  for (std::size_t i = 1; i < x0_trace.size(); ++i) {
    double denom = 1 - x0_trace[i - 1];
    out.push_back(denom <= 0 ? 1.0 : (x0_trace[i] - x0_trace[i - 1]) / denom);
  }
  return out;
}

namespace {

// All roots of fn on [0, 1], found by sign-change scan plus bisection.
std::vector<double> scalar_roots(const std::function<double(double)>& fn, int scan = 4000) {
  std::vector<double> roots;
  double prev_x = 0, prev_f = fn(0);
  if (prev_f == 0) roots.push_back(0);
  for (int k = 1; k <= scan; ++k) {
    double x = static_cast<double>(k) / scan;
    double f = fn(x);
    if (f == 0) {
      roots.push_back(x);
    } else if (prev_f * f < 0) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = fn(mid);
        if (fm == 0) {
          lo = hi = mid;
          break;
        }
        if (fm * prev_f < 0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

BellFixedPoints bell_fixed_points(double q) {
  BellFixedPoints out;
  out.q = q;
  auto hx = [q](double x) { return bell_x0_step(x, q) - x; };
  auto hz = [q](double z) { return bell_z0_step(z, q) - z; };
  std::vector<double> xr = scalar_roots(hx);
  std::vector<double> zr = scalar_roots(hz);

  out.coding_exists = xr.size() >= 3;
  if (out.coding_exists) {
    out.x_s = xr[0];
    out.x_c = xr[1];
    out.x_f = xr.back();
    out.lambda_s = bell_x0_step_derivative(out.x_s, q);
    out.lambda_c = bell_x0_step_derivative(out.x_c, q);
  } else {
    out.x_f = xr.empty() ? 1.0 : xr.back();
  }
  if (zr.size() >= 3) {
    out.z_s = zr[0];
    out.z_c = zr[1];
    out.z_f = zr.back();
  } else {
    out.z_f = zr.empty() ? 1.0 : zr.back();
  }
  return out;
}

double bell_qc() {
  // 32 q^3 - 96 q^2 + 96 q - 5 has a single real root (in (0, 1/16)).
  double q = 0.05;
  for (int it = 0; it < 200; ++it) {
    double f = ((32 * q - 96) * q + 96) * q - 5;
    double df = (96 * q - 192) * q + 96;
    double step = f / df;
    q -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return q;
}

double bell_marginal_x() {
  double qc = bell_qc();
  // At q_c the stable and critical roots merge: g(x) = x and g'(x) = 1.
  auto dh = [qc](double x) { return bell_x0_step_derivative(x, qc) - 1; };
  std::vector<double> roots = scalar_roots(dh);
  for (double r : roots) {
    if (std::abs(bell_x0_step(r, qc) - r) < 1e-8) return r;
  }
  return roots.empty() ? 0.0 : roots.front();
}

BellPhaseDiagram bell_phase_diagram(const std::vector<double>& q_values) {
  BellPhaseDiagram out;
  out.q_c = bell_qc();
  out.rows.reserve(q_values.size());
  for (double q : q_values) out.rows.push_back(bell_fixed_points(q));
  return out;
}

// ---------------------------------------------------------------------------
// Conditional distance distribution.
// ---------------------------------------------------------------------------

double DistanceDistribution::total() const {
  double s = tail;
  for (double v : x) s += v;
  return s;
}

DistanceDistribution initial_distance_distribution(double p, double q, std::size_t d_max) {
  DistanceDistribution dist;
  dist.p = p;
  dist.q = q;
  dist.tau = 0;
  dist.d_max = d_max;
  dist.x = {p, 1 - p};
  return dist;
}

DistanceDistribution conditional_distance_flow(const DistanceDistribution& dist) {
  const double q = dist.q;
  const std::size_t n = dist.x.size();

  // Delocalizer layer: d' = min(d1, d2), i.e. survival requires both, plus
  // the heralded link. In distribution form the min has weight
  // x_d (2 - x_d - 2 sum_{i<d} x_i); the tail is ordered last.
  std::vector<double> xt(n);
  double prefix = 0;
  for (std::size_t d = 0; d < n; ++d) {
    double raw = dist.x[d] * (2 - dist.x[d] - 2 * prefix);
    xt[d] = (1 - q) * raw + (d == 0 ? q : 0.0);
    prefix += dist.x[d];
  }
  double tail_raw = dist.tail * (2 - dist.tail - 2 * prefix);
  double xt_tail = (1 - q) * tail_raw;

  // Copy layer: d' = d1 + d2 (convolution), plus the heralded link.
  std::size_t out_n = std::min(dist.d_max + 1, 2 * n - 1);
  std::vector<double> conv(out_n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (xt[i] == 0) continue;
    std::size_t j_max = std::min(n, out_n - std::min(out_n, i)) ;
    for (std::size_t j = 0; j < n && i + j < out_n; ++j) {
      conv[i + j] += xt[i] * xt[j];
    }
    (void)j_max;
  }
  double conv_sum = 0;
  for (double v : conv) conv_sum += v;
  // Everything that fell past d_max, plus all tail cross terms.
  double conv_tail = std::max(0.0, 1.0 - conv_sum);
  double xt_total = xt_tail;
  for (double v : xt) xt_total += v;
  if (std::abs(xt_total - 1.0) > 1e-9) {
    throw MassLeak("distance distribution lost mass in the delocalizer layer");
  }

  DistanceDistribution out;
  out.p = dist.p;
  out.q = dist.q;
  out.tau = dist.tau + 1;
  out.d_max = dist.d_max;
  out.x.resize(out_n);
  for (std::size_t d = 0; d < out_n; ++d) {
    out.x[d] = (1 - q) * conv[d] + (d == 0 ? q : 0.0);
  }
  out.tail = (1 - q) * conv_tail;

  if (std::abs(out.total() - 1.0) > 1e-9) {
    throw MassLeak("distance distribution lost mass in the copy layer");
  }
  // Trim trailing zero-mass entries, folding denormal dust into the tail.
  while (out.x.size() > 1 && out.x.back() < 1e-300) {
    out.tail += out.x.back();
    out.x.pop_back();
  }
  return out;
}

DistanceStats distance_stats(const DistanceDistribution& dist) {
  DistanceStats s;
  s.x0 = dist.x0();
  double mean = 0;
  for (std::size_t d = 1; d < dist.x.size(); ++d) mean += static_cast<double>(d) * dist.x[d];
  mean += dist.tail * static_cast<double>(dist.d_max);
  s.mean_unconditional = mean;
  s.mean_conditional = s.x0 < 1 ? mean / (1 - s.x0) : 0.0;
  return s;
}

ConditionalDistanceTrace run_conditional_distance(double p, double q, int tau_max,
                                                  const std::vector<int>& keep,
                                                  std::size_t d_max) {
  ConditionalDistanceTrace trace;
  DistanceDistribution dist = initial_distance_distribution(p, q, d_max);
  std::vector<double> peak_value;
  std::vector<int> peak_tau;

  auto record = [&](const DistanceDistribution& d) {
    trace.stats.push_back(distance_stats(d));
    trace.x0.push_back(d.x0());
    for (std::size_t k = 0; k < d.x.size(); ++k) {
      if (k >= peak_value.size()) {
        peak_value.resize(k + 1, -1.0);
        peak_tau.resize(k + 1, 0);
      }
      if (d.x[k] > peak_value[k]) {
        peak_value[k] = d.x[k];
        peak_tau[k] = d.tau;
      }
    }
    if (std::find(keep.begin(), keep.end(), d.tau) != keep.end()) {
      trace.snapshots.push_back(d);
    }
  };

  record(dist);
  for (int tau = 0; tau < tau_max; ++tau) {
    dist = conditional_distance_flow(dist);
    record(dist);
  }

  trace.d_peak.resize(tau_max + 1, 0);
  for (int tau = 0; tau <= tau_max; ++tau) {
    int best = 0;
    for (std::size_t d = 1; d < peak_tau.size(); ++d) {
      // Only count d whose maximum lies strictly inside the computed trace.
      if (peak_tau[d] <= tau && peak_tau[d] < tau_max) best = static_cast<int>(d);
    }
    trace.d_peak[tau] = best;
  }
  return trace;
}

double conditional_distance_growth_rate(double q, int tau_max, int fit_window) {
  ConditionalDistanceTrace trace = run_conditional_distance(q, q, tau_max);
  std::vector<double> ts, logs;
  for (int tau = tau_max - fit_window + 1; tau <= tau_max; ++tau) {
    ts.push_back(tau);
    logs.push_back(std::log(trace.stats[tau].mean_conditional));
  }
  return fit::linear_fit(ts, logs).slope;
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle.
// ---------------------------------------------------------------------------

std::int64_t bell_pattern_distance(int depth, const std::vector<std::uint8_t>& leaf_heralds,
                                   const std::vector<std::uint8_t>& link_heralds) {
  auto rec = [&](auto&& self, int layer, std::size_t idx) -> std::int64_t {
    if (layer == depth) return leaf_heralds[idx] ? 0 : 1;
    std::int64_t l = self(self, layer + 1, 2 * idx);
    std::int64_t r = self(self, layer + 1, 2 * idx + 1);
    // Copy layers sit at even depth from the root, delocalizers between them.
    std::int64_t u = (layer % 2 == 0) ? l + r : std::min(l, r);
    std::size_t flat = TreeSpec::flat_index(layer, idx);
    if (!link_heralds.empty() && link_heralds[flat]) u = 0;
    return u;
  };
  return rec(rec, 0, 0);
}

ConditionalDistanceSample sample_conditional_distance(int tau, double p, double q,
                                                      std::uint64_t samples,
                                                      std::uint64_t seed, int threads) {
  const int depth = 2 * tau;
  const std::size_t n_leaves = std::size_t{1} << depth;
  const std::size_t n_nodes = n_leaves - 1;
  const std::size_t d_cap = (std::size_t{1} << tau) + 1;
  const int top_depth = depth - 2;

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, 64));

  struct Partial {
    std::vector<std::uint64_t> hist;
    std::vector<std::vector<std::uint64_t>> pi;
  };
  std::vector<Partial> partials(threads);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      Partial& part = partials[w];
      part.hist.assign(d_cap, 0);
      part.pi.assign(d_cap, std::vector<std::uint64_t>(d_cap, 0));
      std::vector<std::uint8_t> leaf(n_leaves), link(n_nodes);
      for (std::uint64_t s = w; s < samples; s += threads) {
        Rng rng = Rng::substream(seed, s);
        for (auto& b : leaf) b = rng.bernoulli(p) ? 1 : 0;
        for (auto& b : link) b = rng.bernoulli(q) ? 1 : 0;

        auto full = [&](auto&& self, int layer, std::size_t idx) -> std::int64_t {
          if (layer == depth) return leaf[idx] ? 0 : 1;
          std::int64_t l = self(self, layer + 1, 2 * idx);
          std::int64_t r = self(self, layer + 1, 2 * idx + 1);
          std::int64_t u = (layer % 2 == 0) ? l + r : std::min(l, r);
          if (link[TreeSpec::flat_index(layer, idx)]) u = 0;
          return u;
        };
        std::int64_t d_full = full(full, 0, 0);

        // The time-2(tau-1) tree: same link pattern, with the cut qubits'
        // heralds coming from the links feeding the last two layers.
        std::int64_t d_top = -1;
        if (top_depth >= 0) {
          auto top = [&](auto&& self, int layer, std::size_t idx) -> std::int64_t {
            if (layer == top_depth) {
              return link[TreeSpec::flat_index(layer, idx)] ? 0 : 1;
            }
            std::int64_t l = self(self, layer + 1, 2 * idx);
            std::int64_t r = self(self, layer + 1, 2 * idx + 1);
            std::int64_t u = (layer % 2 == 0) ? l + r : std::min(l, r);
            if (link[TreeSpec::flat_index(layer, idx)]) u = 0;
            return u;
          };
          d_top = top(top, 0, 0);
        }

        if (d_full >= 0 && static_cast<std::size_t>(d_full) < d_cap) {
          ++part.hist[static_cast<std::size_t>(d_full)];
          if (d_top >= 0 && static_cast<std::size_t>(d_top) < d_cap) {
            ++part.pi[static_cast<std::size_t>(d_top)][static_cast<std::size_t>(d_full)];
          }
        }
      }
    });
  }
  for (auto& t : workers) t.join();

  ConditionalDistanceSample out;
  out.samples = samples;
  out.x_empirical.assign(d_cap, 0.0);
  out.pi_counts.assign(d_cap, std::vector<std::uint64_t>(d_cap, 0));
  for (const auto& part : partials) {
    for (std::size_t d = 0; d < d_cap; ++d) {
      out.x_empirical[d] += static_cast<double>(part.hist[d]);
      for (std::size_t e = 0; e < d_cap; ++e) out.pi_counts[d][e] += part.pi[d][e];
    }
  }
  for (double& v : out.x_empirical) v /= static_cast<double>(samples);

  out.bias.assign(d_cap, 0.0);
  out.bias_counts.assign(d_cap, 0);
  for (std::size_t d_star = 0; d_star < d_cap; ++d_star) {
    std::uint64_t count = 0;
    double mean = 0;
    for (std::size_t d = 0; d < d_cap; ++d) {
      count += out.pi_counts[d_star][d];
      mean += static_cast<double>(out.pi_counts[d_star][d]) * static_cast<double>(d);
    }
    out.bias_counts[d_star] = count;
    out.bias[d_star] =
        count > 0 ? mean / static_cast<double>(count) - static_cast<double>(d_star) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balanced erasures.
// ---------------------------------------------------------------------------

BalancedOutcome balanced_erasure_outcome(std::uint64_t erasures, int tau) {
  std::uint64_t mx = erasures, mz = erasures;
  for (int step = 0; step < tau; ++step) {
    mx = (mx / 2 + 1) / 2;        // ceil(floor(M/2)/2)
    mz = ((mz + 1) / 2) / 2;      // floor(ceil(M/2)/2)
  }
  return {mx >= 1 ? 1 : 0, mz >= 1 ? 1 : 0};
}

std::uint64_t balanced_threshold_x(int tau) {
  return ((std::uint64_t{1} << (2 * tau)) + 2) / 3;
}

std::uint64_t balanced_threshold_z(int tau) {
  return ((std::uint64_t{1} << (2 * tau + 1)) + 1) / 3;
}

namespace {

template <class Fn>
std::uint64_t first_loss(std::uint64_t upper, Fn&& lost) {
  // x0(M) is monotone in M; binary-search the single 0 -> 1 jump.
  std::uint64_t lo = 0, hi = upper;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (lost(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

std::uint64_t balanced_threshold_x_recursive(int tau) {
  std::uint64_t total = std::uint64_t{1} << (2 * tau);
  return first_loss(total, [tau](std::uint64_t m) {
    return balanced_erasure_outcome(m, tau).x0 == 1;
  });
}

std::uint64_t balanced_threshold_z_recursive(int tau) {
  std::uint64_t total = std::uint64_t{1} << (2 * tau);
  return first_loss(total, [tau](std::uint64_t m) {
    return balanced_erasure_outcome(m, tau).z0 == 1;
  });
}

// ---------------------------------------------------------------------------
// Postselected ferromagnet.
// ---------------------------------------------------------------------------

double ferro_mx_step(double mx, double q) {
  double c = 1 - 2 * q;
  double m2 = mx * mx;
  return 2 * m2 * c * c / (1 + m2 * m2 * c * c);
}

double ferro_mz_step(double mz, double q) {
  double c = 1 - 2 * q;
  double m2 = mz * mz;
  double denom = (1 + m2) * (1 + m2);
  return 4 * m2 * c * c * c / denom;
}

FerroState ferro_flow(const FerroState& m, double q) {
  return {ferro_mx_step(m.mx, q), ferro_mz_step(m.mz, q)};
}

double ferro_qfm() {
  // 27 (1-2q)^6 = 16.
  double q = 0.04;
  for (int it = 0; it < 200; ++it) {
    double c = 1 - 2 * q;
    double f = 27 * std::pow(c, 6) - 16;
    double df = -2 * 27 * 6 * std::pow(c, 5);
    double step = f / df;
    q -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return q;
}

namespace {

double ferro_mx_derivative(double m, double q) {
  double c2 = (1 - 2 * q) * (1 - 2 * q);
  double m4 = m * m * m * m;
  double denom = (1 + m4 * c2) * (1 + m4 * c2);
  return 4 * m * c2 * (1 - m4 * c2) / denom;
}

}  // namespace

FerroFixedPoints ferro_fixed_points(double q) {
  FerroFixedPoints out;
  out.q = q;
  auto h = [q](double m) { return ferro_mx_step(m, q) - m; };
  std::vector<double> roots = scalar_roots(h);
  // m = 0 is always fixed; a coding pair exists below q_FM.
  std::vector<double> nontrivial;
  for (double r : roots) {
    if (r > 1e-9) nontrivial.push_back(r);
  }
  out.coding_exists = nontrivial.size() >= 2;
  if (out.coding_exists) {
    out.m_c = nontrivial[0];
    out.m_s = nontrivial.back();
    out.lambda_c = ferro_mx_derivative(out.m_c, q);
    out.lambda_s = ferro_mx_derivative(out.m_s, q);
    auto hz = [q](double m) { return ferro_mz_step(m, q) - m; };
    std::vector<double> zroots = scalar_roots(hz);
    std::vector<double> znon;
    for (double r : zroots) {
      if (r > 1e-9) znon.push_back(r);
    }
    if (znon.size() >= 2) {
      out.mz_c = znon[0];
      out.mz_s = znon.back();
    }
  }
  return out;
}

}  // namespace treecode
