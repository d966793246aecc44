#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "treecode/rng.hpp"
#include "treecode/semiring.hpp"
#include "treecode/tensors.hpp"
#include "treecode/tree.hpp"

namespace treecode {

inline constexpr std::int64_t kDistInf = TropSemiring::kInf;

// (d_0, d_X, d_Z, d_Y) with d_0 = 0; entries may be kDistInf.
struct DistanceVector {
  std::array<std::int64_t, 4> d{0, 1, 1, 1};

  bool operator==(const DistanceVector&) const = default;
  std::int64_t operator[](int i) const { return d[i]; }

  static DistanceVector leaf() { return DistanceVector{{0, 1, 1, 1}}; }
};

// Code distance: min over the three logical classes.
std::int64_t distance_of(const DistanceVector& v);
// A zero in a nontrivial class means the logical is reachable for free.
bool logical_lost(const DistanceVector& v);

// Tropical join of two subtree distance vectors through an Rtilde tensor.
DistanceVector distance_join(const RtildeTensor& rt, const DistanceVector& left,
                             const DistanceVector& right);

// Identical-node distance recursion from the leaf vector (0,1,1,1);
// element t of the result is the depth-t vector, t = 0..t_max.
std::vector<DistanceVector> distance_sequence(const RtildeTensor& rt, int t_max);

// Ratio d(t_max)/d(t_max - 1) of the min-distance recursion, in double
// precision (iterated on normalized vectors so t_max can be large).
double distance_growth_ratio(const RtildeTensor& rt, int t_max);

// Conditional distance under heralded erasures: erased leaves cost nothing,
// erased links allow any Pauli for free. Empty masks mean no erasures.
DistanceVector tropical_tree_distance(const TreeSpec& spec,
                                      const std::vector<std::uint8_t>& erased_leaves = {},
                                      const std::vector<std::uint8_t>& erased_links = {});

// Operator-spreading transfer matrix over {X, Z, Y}.
struct TransferReport {
  Eigen::Matrix3d matrix;
  std::array<std::complex<double>, 3> eigenvalues;
  double leading = 0;  // spectral radius
};

TransferReport transfer_matrix(const RTensor& r);

// Pareto-pruned search for maximum-distance balanced trees.
struct PoolEmpty : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrontEntry {
  DistanceVector d;
  int pool_index = -1;  // node type at the root; -1 for the depth-0 leaf
  int left = -1;        // indices into the previous depth's front
  int right = -1;
};

struct SearchResult {
  std::vector<NodeSpec> pool;
  std::vector<std::vector<FrontEntry>> fronts;  // per depth, 0..t_max

  std::int64_t best_distance(int depth) const;
  int best_entry(int depth) const;
  TreeSpec witness(int depth, int entry) const;
  TreeSpec best_tree(int depth) const { return witness(depth, best_entry(depth)); }
};

SearchResult optimal_search(int t_max, const std::vector<NodeSpec>& pool);

// Exhaustive reference: the set of all achievable distance vectors per depth
// (deduplicated, no dominance pruning). Exponentially safer sizes only.
std::vector<std::vector<DistanceVector>> exhaustive_distance_sets(
    int t_max, const std::vector<NodeSpec>& pool);

// Mean distance of random-gate trees (stabilizer input Z at every node).
struct RandomTreeDistance {
  std::vector<double> mean_distance;  // index t-1 for depth t = 1..t_max
  std::vector<double> stderr_mean;
  double growth_base = 0;  // exponential fit over depths > t_exclude
  int t_exclude = 7;
};

RandomTreeDistance random_tree_distance(int t_max, int samples, std::uint64_t seed,
                                        int t_exclude = 7, int threads = 0);

}  // namespace treecode
