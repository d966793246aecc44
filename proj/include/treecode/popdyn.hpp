#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treecode/enumerators.hpp"
#include "treecode/fit.hpp"
#include "treecode/rng.hpp"
#include "treecode/tensors.hpp"
#include "treecode/tree.hpp"

namespace treecode {

enum class PopMode { kGeneral, kCss };
enum class StepTiming { kSynchronous, kContinuous };

struct RunConfig {
  // General mode: identical-node tree built from `node`.
  NodeSpec node{bell_gate(), kPauliZ};
  PopMode mode = PopMode::kGeneral;

  PauliRates surface;  // general-mode leaf rates
  PauliRates bulk;     // general-mode link rates

  // CSS mode (Bell tree in CNOT/NOTC form): independent bit and phase flips
  // at rate css_p on the leaves and css_q on the links; heralded variant
  // replaces the unheralded channels with heralded ones.
  double css_p = 0;
  double css_q = 0;
  bool css_heralded = false;

  std::size_t population = 100000;  // M
  int t_max = 20;                   // layers (general: tree depth; CSS: 2*tau)
  int runs = 10;                    // N independent runs
  std::uint64_t seed = 1;
  StepTiming timing = StepTiming::kSynchronous;
  int threads = 0;

  // Optional |m| histogram collection over a layer window (CSS mode).
  int hist_t_min = -1, hist_t_max = -1;
  double hist_bin = 0.001;
};

// ---------------------------------------------------------------------------
// General four-class populations of normalized coset probability vectors.
// ---------------------------------------------------------------------------

class GeneralPopulation {
 public:
  GeneralPopulation(const RtildeTensor& rt, const PauliRates& surface,
                    const PauliRates& bulk, std::size_t m);

  void init(Rng& rng);
  void step_synchronous(Rng& rng);
  void step_continuous(Rng& rng);

  double failure_probability() const;  // 1 - mean max eta
  int t() const { return t_; }
  std::uint64_t redraws() const { return redraws_; }
  const std::vector<std::array<double, 4>>& population(int cls) const { return cur_[cls]; }

 private:
  std::array<double, 4> make_element(int cls, const std::array<std::vector<std::array<double, 4>>, 4>& src,
                                     Rng& rng);

  RtildeTensor rt_;
  std::array<std::array<int, 3>, 8> pair_table_;  // (alpha1, alpha2, k) per R~ entry
  std::array<std::array<double, 8>, 4> pair_cdf_;  // per target class
  std::array<double, 4> pvec_, qvec_;
  std::size_t m_;
  int t_ = 0;
  std::uint64_t redraws_ = 0;
  std::array<std::vector<std::array<double, 4>>, 4> cur_, next_;
};

// ---------------------------------------------------------------------------
// CSS magnetization populations for the Bell tree. One chain per logical
// basis; each stores the class-0 population and uses the logical symmetry
// m -> -m for class-1 draws.
// ---------------------------------------------------------------------------

enum class CssLayer { kCopy, kDeloc };

class CssPopulation {
 public:
  // `copy_first` selects which layer acts first when stepping up from the
  // leaves (m_z chain: copy first; m_x chain: delocalizer first).
  CssPopulation(bool copy_first, double p, double q, bool heralded, std::size_t m);

  void init(Rng& rng);
  void step_synchronous(Rng& rng);
  void step_continuous(Rng& rng);

  double failure_probability() const;  // (1 - <|m|>)/2
  int layer() const { return layer_; }
  CssLayer next_layer_kind() const;
  std::uint64_t redraws() const { return redraws_; }
  const std::vector<double>& population() const { return cur_; }

 private:
  double make_element(CssLayer kind, const std::vector<double>& src, Rng& rng);

  bool copy_first_;
  double p_, q_;
  bool heralded_;
  std::size_t m_;
  int layer_ = 0;
  std::uint64_t redraws_ = 0;
  std::vector<double> cur_, next_;
};

// ---------------------------------------------------------------------------
// Experiment orchestration.
// ---------------------------------------------------------------------------

struct EstimatorPoint {
  double mean = 0;
  double stderr_mean = 0;
};

struct EstimatorSeries {
  std::vector<int> t;
  std::vector<EstimatorPoint> p_fail;          // general mode
  std::vector<EstimatorPoint> p_x, p_z;        // CSS mode
  std::vector<double> redraw_fraction;         // redraws per proposed element
};

struct Histogram {
  double bin_width = 0.001;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(double value) {
    auto bin = static_cast<std::size_t>(value / bin_width);
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
    ++total;
  }
};

struct ExperimentResult {
  EstimatorSeries series;
  Histogram hist_mx, hist_mz;  // |m| histograms over the collection window
  // First t at which a plateau (>= 5 consecutive steps with |dP| below the
  // cross-run standard error) is detected, or -1.
  int plateau_t = -1;
  std::uint64_t total_redraws = 0;
};

ExperimentResult run_experiment(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// lambda_s fits: P(tau) = P_s + c * lambda^tau over a trailing window chosen
// by a runs-test whiteness protocol.
// ---------------------------------------------------------------------------

struct LambdaFit {
  double p = 0;  // surface rate of this series
  fit::ExpPlateauFit fit;
  int window = 0;
  bool out_of_model = false;  // e.g. doubly exponential decay at q = 0
};

struct LambdaSEstimate {
  double lambda_mean = 0;
  double lambda_stderr = 0;
  std::vector<LambdaFit> per_p;
};

LambdaFit fit_lambda_single(double p, const std::vector<double>& taus,
                            const std::vector<double>& values);
LambdaSEstimate fit_lambda_s(const std::vector<double>& ps,
                             const std::vector<std::vector<double>>& taus,
                             const std::vector<std::vector<double>>& values);

}  // namespace treecode
