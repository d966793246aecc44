#include "treecode/sampler.hpp"

#include <cmath>
#include <thread>

#include "treecode/rng.hpp"

namespace treecode {

namespace {

// Flat bottom-up contraction over the probability semiring with per-level
// renormalization; Rtilde tensors are prebuilt once per tree.
struct FastContractor {
  const TreeSpec& spec;
  std::vector<RtildeTensor> tensors;  // per flat node index

  explicit FastContractor(const TreeSpec& s) : spec(s) {
    tensors.reserve(spec.node_count());
    for (int layer = 0; layer < spec.depth; ++layer) {
      std::size_t width = std::size_t{1} << layer;
      for (std::size_t i = 0; i < width; ++i) {
        const NodeSpec& n = spec.node(layer, i);
        tensors.push_back(build_rtilde(n.gate, n.stab));
      }
    }
  }

  // leaves: one 4-vector per leaf; link_f: nullptr or (alpha, f) per node.
  CosetProbs run(std::vector<std::array<double, 4>>& values,
                 const std::vector<Pauli>* bulk_fault,
                 const std::array<double, 4>* fq) const {
    for (int layer = spec.depth - 1; layer >= 0; --layer) {
      std::size_t width = std::size_t{1} << layer;
      for (std::size_t i = 0; i < width; ++i) {
        std::size_t flat = TreeSpec::flat_index(layer, i);
        const RtildeTensor& rt = tensors[flat];
        const auto& l = values[2 * i];
        const auto& r = values[2 * i + 1];
        std::array<double, 4> u;
        for (int c = 0; c < 4; ++c) {
          const PauliPair& p0 = rt.pairs[c][0];
          const PauliPair& p1 = rt.pairs[c][1];
          u[c] = l[p0.left] * r[p0.right] + l[p1.left] * r[p1.right];
        }
        if (bulk_fault) {
          Pauli alpha = (*bulk_fault)[flat];
          std::array<double, 4> v;
          for (int c = 0; c < 4; ++c) {
            double acc = 0;
            for (int j = 0; j < 4; ++j) acc += (*fq)[alpha ^ c ^ j] * u[j];
            v[c] = acc;
          }
          u = v;
        }
        double total = u[0] + u[1] + u[2] + u[3];
        if (total > 0) {
          for (double& v : u) v /= total;
        }
        values[i] = u;
      }
    }
    double total = values[0][0] + values[0][1] + values[0][2] + values[0][3];
    if (!(total > 0)) throw DegenerateSyndrome("coset probabilities vanished");
    CosetProbs out;
    for (int c = 0; c < 4; ++c) out.eta[c] = values[0][c] / total;
    return out;
  }
};

int draw_pauli(const std::array<double, 4>& f, Rng& rng) {
  double u = rng.uniform();
  double acc = 0;
  for (int a = 0; a < 4; ++a) {
    acc += f[a];
    if (u < acc) return a;
  }
  return 0;
}

}  // namespace

SampleResult sample_and_decode(const TreeSpec& spec, const PauliRates& p,
                               const std::optional<PauliRates>& bulk,
                               std::uint64_t samples, std::uint64_t seed, int threads) {
  FastContractor contractor(spec);
  std::array<double, 4> fp = p.f_vector();
  std::array<double, 4> fq = bulk ? bulk->f_vector() : std::array<double, 4>{1, 0, 0, 0};

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max<int>(
      1, static_cast<int>(std::min<std::uint64_t>(threads, samples)));

  std::vector<std::uint64_t> fail_counts(threads, 0), tie_counts(threads, 0);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      std::vector<std::array<double, 4>> values(spec.leaf_count());
      std::vector<Pauli> bulk_fault(bulk ? spec.node_count() : 0);
      std::uint64_t fails = 0, ties = 0;
      for (std::uint64_t s = w; s < samples; s += threads) {
        Rng rng = Rng::substream(seed, s);
        for (std::size_t i = 0; i < spec.leaf_count(); ++i) {
          auto alpha = static_cast<Pauli>(draw_pauli(fp, rng));
          for (int j = 0; j < 4; ++j) values[i][j] = fp[alpha ^ j];
        }
        if (bulk) {
          for (auto& b : bulk_fault) b = static_cast<Pauli>(draw_pauli(fq, rng));
        }
        CosetProbs eta =
            contractor.run(values, bulk ? &bulk_fault : nullptr, bulk ? &fq : nullptr);
        // The pattern itself is the canonical fault, so success means the
        // identity class wins outright; ties count as failures.
        bool tied = eta.argmax_tied();
        if (eta.argmax() != 0 || tied) {
          ++fails;
          if (tied) ++ties;
        }
      }
      fail_counts[w] = fails;
      tie_counts[w] = ties;
    });
  }
  for (auto& t : workers) t.join();

  SampleResult res;
  res.samples = samples;
  for (int w = 0; w < threads; ++w) {
    res.failures += fail_counts[w];
    res.ties += tie_counts[w];
  }
  res.p_fail = static_cast<double>(res.failures) / static_cast<double>(samples);
  res.stderr_est =
      std::sqrt(res.p_fail * (1 - res.p_fail) / static_cast<double>(samples));
  return res;
}

bool decode_fails(const TreeSpec& spec, const std::vector<Pauli>& surface_error,
                  const PauliRates& p) {
  CosetProbs eta = coset_probs(spec, surface_error, p);
  return eta.argmax() != 0 || eta.argmax_tied();
}

double exhaustive_failure_probability(const TreeSpec& spec, const PauliRates& p) {
  if (spec.depth > 3) {
    throw std::invalid_argument("exhaustive enumeration is limited to depth <= 3");
  }
  FastContractor contractor(spec);
  std::array<double, 4> fp = p.f_vector();
  std::size_t n = spec.leaf_count();
  std::vector<Pauli> pattern(n, kPauliI);
  std::vector<std::array<double, 4>> values(n);
  double p_fail = 0;
  std::uint64_t total = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    double weight = 1;
    for (std::size_t i = 0; i < n; ++i) {
      pattern[i] = static_cast<Pauli>(c & 3);
      c >>= 2;
      weight *= fp[pattern[i]];
    }
    if (weight == 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < 4; ++j) values[i][j] = fp[pattern[i] ^ j];
    }
    CosetProbs eta = contractor.run(values, nullptr, nullptr);
    if (eta.argmax() != 0 || eta.argmax_tied()) p_fail += weight;
  }
  return p_fail;
}

}  // namespace treecode
