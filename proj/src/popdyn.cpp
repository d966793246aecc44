#include "treecode/popdyn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace treecode {

namespace {
constexpr int kMaxRedraws = 100000;
}

// ---------------------------------------------------------------------------
// GeneralPopulation
// ---------------------------------------------------------------------------

GeneralPopulation::GeneralPopulation(const RtildeTensor& rt, const PauliRates& surface,
                                     const PauliRates& bulk, std::size_t m)
    : rt_(rt), pvec_(surface.f_vector()), qvec_(bulk.f_vector()), m_(m) {
  int entry = 0;
  for (int k = 0; k < 4; ++k) {
    for (const PauliPair& p : rt_.pairs[k]) {
      pair_table_[entry] = {p.left, p.right, k};
      ++entry;
    }
  }
  for (int i = 0; i < 4; ++i) {
    double acc = 0;
    for (int e = 0; e < 8; ++e) {
      acc += qvec_[pair_table_[e][2] ^ i];
      pair_cdf_[i][e] = acc;
    }
    for (int e = 0; e < 8; ++e) pair_cdf_[i][e] /= acc;
  }
  for (auto& pop : cur_) pop.resize(m_);
  for (auto& pop : next_) pop.resize(m_);
}

void GeneralPopulation::init(Rng& rng) {
  t_ = 0;
  redraws_ = 0;
  for (int i = 0; i < 4; ++i) {
    for (std::size_t e = 0; e < m_; ++e) {
      double u = rng.uniform();
      int alpha = 0;
      double acc = 0;
      for (int a = 0; a < 4; ++a) {
        acc += pvec_[a ^ i];
        if (u < acc) {
          alpha = a;
          break;
        }
      }
      std::array<double, 4> eta;
      for (int j = 0; j < 4; ++j) eta[j] = pvec_[alpha ^ j];
      cur_[i][e] = eta;
    }
  }
}

std::array<double, 4> GeneralPopulation::make_element(
    int cls, const std::array<std::vector<std::array<double, 4>>, 4>& src, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    double u = rng.uniform();
    int entry = 0;
    while (entry < 7 && u >= pair_cdf_[cls][entry]) ++entry;
    int a1 = pair_table_[entry][0];
    int a2 = pair_table_[entry][1];
    const std::array<double, 4>& eta1 = src[a1][rng.index(m_)];
    const std::array<double, 4>& eta2 = src[a2][rng.index(m_)];

    std::array<double, 4> w{0, 0, 0, 0};
    for (int e = 0; e < 8; ++e) {
      w[pair_table_[e][2]] += eta1[pair_table_[e][0]] * eta2[pair_table_[e][1]];
    }
    double z = w[0] + w[1] + w[2] + w[3];
    if (z <= 0) {
      ++redraws_;
      continue;
    }
    std::array<double, 4> out;
    double total = 0;
    for (int i = 0; i < 4; ++i) {
      double v = 0;
      for (int l = 0; l < 4; ++l) v += qvec_[i ^ l] * w[l];
      out[i] = v;
      total += v;
    }
    for (double& v : out) v /= total;
    return out;
  }
  throw std::runtime_error("population dynamics: redraw limit hit (all-frustrated draws)");
}

void GeneralPopulation::step_synchronous(Rng& rng) {
  for (int i = 0; i < 4; ++i) {
    for (std::size_t e = 0; e < m_; ++e) {
      next_[i][e] = make_element(i, cur_, rng);
    }
  }
  std::swap(cur_, next_);
  ++t_;
}

void GeneralPopulation::step_continuous(Rng& rng) {
  for (std::size_t e = 0; e < m_; ++e) {
    for (int i = 0; i < 4; ++i) {
      cur_[i][rng.index(m_)] = make_element(i, cur_, rng);
    }
  }
  ++t_;
}

double GeneralPopulation::failure_probability() const {
  double acc = 0;
  for (const auto& pop : cur_) {
    for (const auto& eta : pop) {
      acc += *std::max_element(eta.begin(), eta.end());
    }
  }
  return 1.0 - acc / static_cast<double>(4 * m_);
}

// ---------------------------------------------------------------------------
// CssPopulation
// ---------------------------------------------------------------------------

CssPopulation::CssPopulation(bool copy_first, double p, double q, bool heralded,
                             std::size_t m)
    : copy_first_(copy_first), p_(p), q_(q), heralded_(heralded), m_(m) {
  cur_.resize(m_);
  next_.resize(m_);
}

void CssPopulation::init(Rng& rng) {
  layer_ = 0;
  redraws_ = 0;
  for (std::size_t e = 0; e < m_; ++e) {
    if (heralded_) {
      cur_[e] = rng.bernoulli(p_) ? 0.0 : 1.0;
    } else {
      double m0 = 1 - 2 * p_;
      cur_[e] = rng.bernoulli(p_) ? -m0 : m0;
    }
  }
}

CssLayer CssPopulation::next_layer_kind() const {
  bool first = (layer_ % 2 == 0);
  return (first == copy_first_) ? CssLayer::kCopy : CssLayer::kDeloc;
}

double CssPopulation::make_element(CssLayer kind, const std::vector<double>& src, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    if (heralded_ && rng.bernoulli(q_)) return 0.0;
    double m1, m2;
    if (kind == CssLayer::kCopy) {
      // Class pairs (0,0) with weight 1-q and (1,1) with weight q.
      bool flip = !heralded_ && rng.bernoulli(q_);
      m1 = src[rng.index(m_)];
      m2 = src[rng.index(m_)];
      if (flip) {
        m1 = -m1;
        m2 = -m2;
      }
      double z = 1 + m1 * m2;
      if (z <= 0) {
        ++redraws_;
        continue;
      }
      double mhat = (m1 + m2) / z;
      return heralded_ ? mhat : (1 - 2 * q_) * mhat;
    }
    // Delocalizer: pairs (0,0), (1,1) with weight 1-q and (0,1), (1,0) with
    // weight q; all carry z = 1.
    bool cross = !heralded_ && rng.bernoulli(q_);
    bool swap_classes = rng.bernoulli(0.5);
    m1 = src[rng.index(m_)];
    m2 = src[rng.index(m_)];
    if (cross) {
      (swap_classes ? m1 : m2) = -(swap_classes ? m1 : m2);
    } else if (swap_classes) {
      m1 = -m1;
      m2 = -m2;
    }
    double mhat = m1 * m2;
    return heralded_ ? mhat : (1 - 2 * q_) * mhat;
  }
  throw std::runtime_error("population dynamics: redraw limit hit (all-frustrated draws)");
}

void CssPopulation::step_synchronous(Rng& rng) {
  CssLayer kind = next_layer_kind();
  for (std::size_t e = 0; e < m_; ++e) next_[e] = make_element(kind, cur_, rng);
  std::swap(cur_, next_);
  ++layer_;
}

void CssPopulation::step_continuous(Rng& rng) {
  CssLayer kind = next_layer_kind();
  for (std::size_t e = 0; e < m_; ++e) {
    cur_[rng.index(m_)] = make_element(kind, cur_, rng);
  }
  ++layer_;
}

double CssPopulation::failure_probability() const {
  double acc = 0;
  for (double m : cur_) acc += std::abs(m);
  return (1.0 - acc / static_cast<double>(m_)) / 2.0;
}

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

namespace {

struct RunOutput {
  std::vector<double> p_fail, p_x, p_z;
  std::uint64_t redraws = 0;
  Histogram hist_mx, hist_mz;
};

RunOutput execute_run(const RunConfig& cfg, std::uint64_t run_idx) {
  RunOutput out;
  Rng rng = Rng::substream(cfg.seed, run_idx);
  out.hist_mx.bin_width = cfg.hist_bin;
  out.hist_mz.bin_width = cfg.hist_bin;

  if (cfg.mode == PopMode::kGeneral) {
    RtildeTensor rt = build_rtilde(cfg.node.gate, cfg.node.stab);
    GeneralPopulation pop(rt, cfg.surface, cfg.bulk, cfg.population);
    pop.init(rng);
    out.p_fail.push_back(pop.failure_probability());
    for (int t = 0; t < cfg.t_max; ++t) {
      if (cfg.timing == StepTiming::kSynchronous) {
        pop.step_synchronous(rng);
      } else {
        pop.step_continuous(rng);
      }
      out.p_fail.push_back(pop.failure_probability());
    }
    out.redraws = pop.redraws();
    return out;
  }

  CssPopulation mx(/*copy_first=*/false, cfg.css_p, cfg.css_q, cfg.css_heralded,
                   cfg.population);
  CssPopulation mz(/*copy_first=*/true, cfg.css_p, cfg.css_q, cfg.css_heralded,
                   cfg.population);
  mx.init(rng);
  mz.init(rng);
  auto collect = [&](int t) {
    out.p_x.push_back(mx.failure_probability());
    out.p_z.push_back(mz.failure_probability());
    // Histograms are collected at even depths only (integer tau), where the
    // chains hold the m_x and m_z stationary shapes.
    if (t >= cfg.hist_t_min && t <= cfg.hist_t_max && t % 2 == 0) {
      for (double m : mx.population()) out.hist_mx.add(std::abs(m));
      for (double m : mz.population()) out.hist_mz.add(std::abs(m));
    }
  };
  collect(0);
  for (int t = 0; t < cfg.t_max; ++t) {
    if (cfg.timing == StepTiming::kSynchronous) {
      mx.step_synchronous(rng);
      mz.step_synchronous(rng);
    } else {
      mx.step_continuous(rng);
      mz.step_continuous(rng);
    }
    collect(t + 1);
  }
  out.redraws = mx.redraws() + mz.redraws();
  return out;
}

EstimatorPoint across_runs(const std::vector<RunOutput>& runs,
                           const std::vector<double> RunOutput::* series, std::size_t t) {
  EstimatorPoint pt;
  double n = static_cast<double>(runs.size());
  for (const auto& r : runs) pt.mean += (r.*series)[t];
  pt.mean /= n;
  if (runs.size() > 1) {
    double var = 0;
    for (const auto& r : runs) {
      double d = (r.*series)[t] - pt.mean;
      var += d * d;
    }
    pt.stderr_mean = std::sqrt(var / (n - 1) / n);
  }
  return pt;
}

void merge_hist(Histogram& into, const Histogram& from) {
  if (from.counts.size() > into.counts.size()) into.counts.resize(from.counts.size(), 0);
  for (std::size_t k = 0; k < from.counts.size(); ++k) into.counts[k] += from.counts[k];
  into.total += from.total;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  if (cfg.population < 10) throw std::invalid_argument("population size too small");
  if (cfg.runs < 1) throw std::invalid_argument("need at least one run");

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, cfg.runs));

  std::vector<RunOutput> runs(cfg.runs);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (int r = w; r < cfg.runs; r += threads) {
        runs[r] = execute_run(cfg, static_cast<std::uint64_t>(r));
      }
    });
  }
  for (auto& th : workers) th.join();

  ExperimentResult res;
  res.hist_mx.bin_width = cfg.hist_bin;
  res.hist_mz.bin_width = cfg.hist_bin;
  std::size_t n_t = cfg.mode == PopMode::kGeneral ? runs[0].p_fail.size() : runs[0].p_x.size();
  std::uint64_t proposals = 0;
  for (std::size_t t = 0; t < n_t; ++t) {
    res.series.t.push_back(static_cast<int>(t));
    if (cfg.mode == PopMode::kGeneral) {
      res.series.p_fail.push_back(across_runs(runs, &RunOutput::p_fail, t));
    } else {
      res.series.p_x.push_back(across_runs(runs, &RunOutput::p_x, t));
      res.series.p_z.push_back(across_runs(runs, &RunOutput::p_z, t));
    }
  }
  for (const auto& r : runs) {
    res.total_redraws += r.redraws;
    merge_hist(res.hist_mx, r.hist_mx);
    merge_hist(res.hist_mz, r.hist_mz);
  }
  proposals = static_cast<std::uint64_t>(cfg.runs) * cfg.population * cfg.t_max *
              (cfg.mode == PopMode::kGeneral ? 4 : 2);
  res.series.redraw_fraction.assign(n_t, proposals ? static_cast<double>(res.total_redraws) /
                                                         static_cast<double>(proposals)
                                                   : 0.0);

  // Plateau: >= 5 consecutive steps whose increments stay below the combined
  // cross-run standard error.
  const auto& series = cfg.mode == PopMode::kGeneral ? res.series.p_fail : res.series.p_x;
  int consecutive = 0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    double err = series[t].stderr_mean + series[t - 1].stderr_mean;
    if (std::abs(series[t].mean - series[t - 1].mean) < std::max(err, 1e-12)) {
      if (++consecutive >= 5 && res.plateau_t < 0) {
        res.plateau_t = static_cast<int>(t) - consecutive + 1;
      }
    } else {
      consecutive = 0;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// lambda_s fitting
// ---------------------------------------------------------------------------

LambdaFit fit_lambda_single(double p, const std::vector<double>& taus,
                            const std::vector<double>& values) {
  if (taus.size() != values.size() || taus.size() < 8) {
    throw std::invalid_argument("fit_lambda_single needs >= 8 points");
  }
  LambdaFit out;
  out.p = p;

  // Trailing-window protocol: take the longest trailing window (>= 8 points)
  // whose residuals pass a runs test at the 5% level; fall back to the last
  // third of the series.
  std::size_t n = taus.size();
  std::size_t best = 0;
  fit::ExpPlateauFit best_fit;
  for (std::size_t start = 0; start + 8 <= n; ++start) {
    std::vector<double> ts(taus.begin() + start, taus.end());
    std::vector<double> ys(values.begin() + start, values.end());
    fit::ExpPlateauFit f = fit::fit_exp_plateau(ts, ys);
    std::vector<double> resid(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      resid[i] = ys[i] - (f.plateau + f.amplitude * std::pow(f.lambda, ts[i]));
    }
    if (fit::runs_test_pvalue(resid) > 0.05) {
      best = n - start;
      best_fit = f;
      break;
    }
    if (start == 0) best_fit = f;  // fallback: full series
  }
  if (best == 0) best = std::max<std::size_t>(8, n / 3);
  out.window = static_cast<int>(best);
  if (!best_fit.ok) {
    std::vector<double> ts(taus.end() - best, taus.end());
    std::vector<double> ys(values.end() - best, values.end());
    best_fit = fit::fit_exp_plateau(ts, ys);
  }
  out.fit = best_fit;

  // Doubly exponential decay shows up as a decay rate that keeps steepening:
  // compare fits on the two halves of the window.
  std::size_t start = n - best;
  std::size_t half = best / 2;
  if (half >= 4) {
    std::vector<double> t1(taus.begin() + start, taus.begin() + start + half);
    std::vector<double> y1(values.begin() + start, values.begin() + start + half);
    std::vector<double> t2(taus.begin() + start + half, taus.end());
    std::vector<double> y2(values.begin() + start + half, values.end());
    fit::ExpPlateauFit f1 = fit::fit_exp_plateau(t1, y1);
    fit::ExpPlateauFit f2 = fit::fit_exp_plateau(t2, y2);
    if (f1.ok && f2.ok && f2.lambda < 0.8 * f1.lambda) out.out_of_model = true;
  }
  return out;
}

LambdaSEstimate fit_lambda_s(const std::vector<double>& ps,
                             const std::vector<std::vector<double>>& taus,
                             const std::vector<std::vector<double>>& values) {
  if (ps.size() != taus.size() || ps.size() != values.size() || ps.empty()) {
    throw std::invalid_argument("fit_lambda_s: mismatched series");
  }
  LambdaSEstimate out;
  std::vector<double> lambdas;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    LambdaFit f = fit_lambda_single(ps[k], taus[k], values[k]);
    out.per_p.push_back(f);
    if (f.fit.ok && !f.out_of_model) lambdas.push_back(f.fit.lambda);
  }
  if (!lambdas.empty()) {
    double n = static_cast<double>(lambdas.size());
    for (double l : lambdas) out.lambda_mean += l;
    out.lambda_mean /= n;
    if (lambdas.size() > 1) {
      double var = 0;
      for (double l : lambdas) var += (l - out.lambda_mean) * (l - out.lambda_mean);
      out.lambda_stderr = std::sqrt(var / (n - 1) / n);
    }
  }
  return out;
}

}  // namespace treecode
