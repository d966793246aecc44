#include "treecode/distance.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "treecode/fit.hpp"

namespace treecode {

std::int64_t distance_of(const DistanceVector& v) {
  return std::min({v.d[1], v.d[2], v.d[3]});
}

bool logical_lost(const DistanceVector& v) {
  return v.d[1] == 0 || v.d[2] == 0 || v.d[3] == 0;
}

DistanceVector distance_join(const RtildeTensor& rt, const DistanceVector& left,
                             const DistanceVector& right) {
  DistanceVector out;
  for (int i = 0; i < 4; ++i) {
    const PauliPair& p0 = rt.pairs[i][0];
    const PauliPair& p1 = rt.pairs[i][1];
    out.d[i] = std::min(TropSemiring::mul(left.d[p0.left], right.d[p0.right]),
                        TropSemiring::mul(left.d[p1.left], right.d[p1.right]));
  }
  return out;
}

std::vector<DistanceVector> distance_sequence(const RtildeTensor& rt, int t_max) {
  std::vector<DistanceVector> seq;
  seq.reserve(t_max + 1);
  seq.push_back(DistanceVector::leaf());
  for (int t = 0; t < t_max; ++t) {
    seq.push_back(distance_join(rt, seq.back(), seq.back()));
  }
  return seq;
}

double distance_growth_ratio(const RtildeTensor& rt, int t_max) {
  // Double-precision variant of the join, renormalized each depth so the
  // ratio can be tracked to large t without integer overflow.
  std::array<double, 4> v{0, 1, 1, 1};
  double prev_min = 1, ratio = 0;
  const double inf = 1e300;
  for (int t = 0; t < t_max; ++t) {
    std::array<double, 4> u;
    for (int i = 0; i < 4; ++i) {
      const PauliPair& p0 = rt.pairs[i][0];
      const PauliPair& p1 = rt.pairs[i][1];
      double s0 = (v[p0.left] >= inf || v[p0.right] >= inf) ? inf : v[p0.left] + v[p0.right];
      double s1 = (v[p1.left] >= inf || v[p1.right] >= inf) ? inf : v[p1.left] + v[p1.right];
      u[i] = std::min(s0, s1);
    }
    double cur_min = std::min({u[1], u[2], u[3]});
    ratio = cur_min / prev_min;
    double scale = cur_min > 0 && cur_min < inf ? cur_min : 1.0;
    prev_min = 1.0;
    for (int i = 1; i < 4; ++i) u[i] = u[i] >= inf ? inf : u[i] / scale;
    u[0] = 0;
    v = u;
  }
  return ratio;
}

DistanceVector tropical_tree_distance(const TreeSpec& spec,
                                      const std::vector<std::uint8_t>& erased_leaves,
                                      const std::vector<std::uint8_t>& erased_links) {
  if (!erased_leaves.empty() && erased_leaves.size() != spec.leaf_count()) {
    throw std::invalid_argument("erased_leaves mask size mismatch");
  }
  if (!erased_links.empty() && erased_links.size() != spec.node_count()) {
    throw std::invalid_argument("erased_links mask size mismatch");
  }
  auto rec = [&](auto&& self, int layer, std::size_t idx) -> DistanceVector {
    if (layer == spec.depth) {
      bool erased = !erased_leaves.empty() && erased_leaves[idx];
      return erased ? DistanceVector{{0, 0, 0, 0}} : DistanceVector::leaf();
    }
    const NodeSpec& n = spec.node(layer, idx);
    RtildeTensor rt = build_rtilde(n.gate, n.stab);
    DistanceVector l = self(self, layer + 1, 2 * idx);
    DistanceVector r = self(self, layer + 1, 2 * idx + 1);
    DistanceVector u = distance_join(rt, l, r);
    if (!erased_links.empty() && erased_links[TreeSpec::flat_index(layer, idx)]) {
      // A free Pauli on this link: every class can borrow any other class.
      std::int64_t m = std::min({u.d[0], u.d[1], u.d[2], u.d[3]});
      u = DistanceVector{{m, m, m, m}};
    }
    return u;
  };
  return rec(rec, 0, 0);
}

TransferReport transfer_matrix(const RTensor& r) {
  TransferReport rep;
  rep.matrix.setZero();
  for (int j = 1; j < 4; ++j) {
    PauliPair img = r.at(static_cast<Pauli>(j), kPauliI);
    for (int i = 1; i < 4; ++i) {
      double count = (img.left == i ? 1 : 0) + (img.right == i ? 1 : 0);
      rep.matrix(i - 1, j - 1) = count;
    }
  }
  Eigen::EigenSolver<Eigen::Matrix3d> solver(rep.matrix);
  for (int k = 0; k < 3; ++k) {
    rep.eigenvalues[k] = solver.eigenvalues()(k);
    rep.leading = std::max(rep.leading, std::abs(rep.eigenvalues[k]));
  }
  return rep;
}

namespace {

// B dominates A when every logical component of B is at least as large.
bool dominates(const DistanceVector& b, const DistanceVector& a) {
  return b.d[1] >= a.d[1] && b.d[2] >= a.d[2] && b.d[3] >= a.d[3];
}

std::uint64_t dvec_key(const DistanceVector& v) {
  auto clamp = [](std::int64_t x) {
    return static_cast<std::uint64_t>(std::min<std::int64_t>(x, 0xfffff));
  };
  return clamp(v.d[1]) | (clamp(v.d[2]) << 20) | (clamp(v.d[3]) << 40);
}

bool mirror_symmetric(const RtildeTensor& rt) {
  for (int i = 0; i < 4; ++i) {
    PauliPair m0{rt.pairs[i][0].right, rt.pairs[i][0].left};
    PauliPair m1{rt.pairs[i][1].right, rt.pairs[i][1].left};
    bool same = (m0 == rt.pairs[i][0] && m1 == rt.pairs[i][1]) ||
                (m0 == rt.pairs[i][1] && m1 == rt.pairs[i][0]);
    if (!same) return false;
  }
  return true;
}

}  // namespace

std::int64_t SearchResult::best_distance(int depth) const {
  std::int64_t best = 0;
  for (const auto& e : fronts[depth]) best = std::max(best, distance_of(e.d));
  return best;
}

int SearchResult::best_entry(int depth) const {
  int best = 0;
  for (std::size_t k = 1; k < fronts[depth].size(); ++k) {
    if (distance_of(fronts[depth][k].d) > distance_of(fronts[depth][best].d)) {
      best = static_cast<int>(k);
    }
  }
  return best;
}

TreeSpec SearchResult::witness(int depth, int entry) const {
  TreeSpec spec = TreeSpec::uniform(depth, pool.empty() ? NodeSpec{} : pool[0]);
  auto fill = [&](auto&& self, int d, int e, int layer, std::size_t idx) -> void {
    if (d == 0) return;
    const FrontEntry& fe = fronts[d][e];
    spec.node(layer, idx) = pool[fe.pool_index];
    self(self, d - 1, fe.left, layer + 1, 2 * idx);
    self(self, d - 1, fe.right, layer + 1, 2 * idx + 1);
  };
  fill(fill, depth, entry, 0, 0);
  return spec;
}

SearchResult optimal_search(int t_max, const std::vector<NodeSpec>& pool) {
  if (pool.empty()) throw PoolEmpty("optimal_search needs a nonempty gate pool");
  SearchResult res;
  res.pool = pool;
  std::vector<RtildeTensor> tensors;
  std::vector<bool> symmetric;
  tensors.reserve(pool.size());
  for (const auto& n : pool) {
    tensors.push_back(build_rtilde(n.gate, n.stab));
    symmetric.push_back(mirror_symmetric(tensors.back()));
  }

  res.fronts.resize(t_max + 1);
  res.fronts[0].push_back(FrontEntry{DistanceVector::leaf(), -1, -1, -1});

  for (int t = 0; t < t_max; ++t) {
    const auto& prev = res.fronts[t];
    std::vector<FrontEntry> candidates;
    std::map<std::uint64_t, std::size_t> seen;  // dedup identical vectors
    for (std::size_t g = 0; g < tensors.size(); ++g) {
      for (std::size_t a = 0; a < prev.size(); ++a) {
        std::size_t b_start = symmetric[g] ? a : 0;
        for (std::size_t b = b_start; b < prev.size(); ++b) {
          FrontEntry e;
          e.d = distance_join(tensors[g], prev[a].d, prev[b].d);
          e.pool_index = static_cast<int>(g);
          e.left = static_cast<int>(a);
          e.right = static_cast<int>(b);
          auto key = dvec_key(e.d);
          if (seen.emplace(key, candidates.size()).second) {
            candidates.push_back(e);
          }
        }
      }
    }
    // Pareto prune: keep only non-dominated vectors.
    std::vector<FrontEntry> front;
    for (const auto& c : candidates) {
      bool dominated = false;
      for (const auto& other : candidates) {
        if (&other != &c && dominates(other.d, c.d) && !(other.d == c.d)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) front.push_back(c);
    }
    res.fronts[t + 1] = std::move(front);
  }
  return res;
}

std::vector<std::vector<DistanceVector>> exhaustive_distance_sets(
    int t_max, const std::vector<NodeSpec>& pool) {
  if (pool.empty()) throw PoolEmpty("exhaustive search needs a nonempty gate pool");
  std::vector<RtildeTensor> tensors;
  for (const auto& n : pool) tensors.push_back(build_rtilde(n.gate, n.stab));

  std::vector<std::vector<DistanceVector>> sets(t_max + 1);
  sets[0].push_back(DistanceVector::leaf());
  for (int t = 0; t < t_max; ++t) {
    std::map<std::uint64_t, DistanceVector> out;
    for (const auto& rt : tensors) {
      for (const auto& a : sets[t]) {
        for (const auto& b : sets[t]) {
          DistanceVector v = distance_join(rt, a, b);
          out.emplace(dvec_key(v), v);
        }
      }
    }
    sets[t + 1].reserve(out.size());
    for (const auto& [k, v] : out) sets[t + 1].push_back(v);
  }
  return sets;
}

RandomTreeDistance random_tree_distance(int t_max, int samples, std::uint64_t seed,
                                        int t_exclude, int threads) {
  RandomTreeDistance out;
  out.t_exclude = t_exclude;
  out.mean_distance.resize(t_max);
  out.stderr_mean.resize(t_max);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, samples));

  const auto& group = symplectic2_group();
  for (int t = 1; t <= t_max; ++t) {
    std::vector<double> partial_sum(threads, 0.0), partial_sq(threads, 0.0);
    std::vector<std::thread> workers;
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w, t] {
        double acc = 0, acc2 = 0;
        for (int s = w; s < samples; s += threads) {
          Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t) * 1000003ULL + s);
          // Per-node random gates with Z stabilizer inputs; contract on the fly.
          auto rec = [&](auto&& self, int layer) -> DistanceVector {
            if (layer == t) return DistanceVector::leaf();
            const TwoQubitClifford& g = group[rng.index(group.size())];
            RtildeTensor rt = build_rtilde(g, kPauliZ);
            DistanceVector l = self(self, layer + 1);
            DistanceVector r = self(self, layer + 1);
            return distance_join(rt, l, r);
          };
          double d = static_cast<double>(distance_of(rec(rec, 0)));
          acc += d;
          acc2 += d * d;
        }
        partial_sum[w] = acc;
        partial_sq[w] = acc2;
      });
    }
    for (auto& th : workers) th.join();
    double sum = 0, sq = 0;
    for (int w = 0; w < threads; ++w) {
      sum += partial_sum[w];
      sq += partial_sq[w];
    }
    double mean = sum / samples;
    double var = std::max(0.0, sq / samples - mean * mean);
    out.mean_distance[t - 1] = mean;
    out.stderr_mean[t - 1] = std::sqrt(var / samples);
  }

  std::vector<double> ts, logs;
  for (int t = t_exclude + 1; t <= t_max; ++t) {
    ts.push_back(t);
    logs.push_back(std::log(out.mean_distance[t - 1]));
  }
  out.growth_base = std::exp(fit::linear_fit(ts, logs).slope);
  return out;
}

}  // namespace treecode
