#include "treecode/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace treecode::fit {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit needs >= 2 matched points");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = x[i];
    a(i, 1) = 1.0;
    b(i) = y[i];
  }
  Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  LinearFit out;
  out.slope = coef(0);
  out.intercept = coef(1);
  Eigen::VectorXd resid = b - a * coef;
  out.rss = resid.squaredNorm();
  if (n > 2) {
    double sigma2 = out.rss / static_cast<double>(n - 2);
    double sxx = (a.col(0).array() - a.col(0).mean()).square().sum();
    out.slope_stderr = std::sqrt(sigma2 / sxx);
  }
  return out;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

namespace {

// Least squares in (c1, c2) for y = c1 + c2 * g(t); returns RSS.
double two_param_rss(std::span<const double> g, std::span<const double> y, double* c1,
                     double* c2) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = g[i];
    b(i) = y[i];
  }
  Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  *c1 = coef(0);
  *c2 = coef(1);
  return (b - a * coef).squaredNorm();
}

}  // namespace

ExpPlateauFit fit_exp_plateau(std::span<const double> t, std::span<const double> y,
                              double lambda_min, double lambda_max) {
  if (t.size() != y.size() || t.size() < 4) {
    throw std::invalid_argument("fit_exp_plateau needs >= 4 matched points");
  }
  auto rss_at = [&](double lambda, double* c1, double* c2) {
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) g[i] = std::pow(lambda, t[i]);
    return two_param_rss(g, y, c1, c2);
  };

  // Coarse scan in log(lambda), then golden-section refinement.
  ExpPlateauFit best;
  best.rss = std::numeric_limits<double>::infinity();
  const int kScan = 400;
  for (int k = 0; k <= kScan; ++k) {
    double lambda = lambda_min * std::pow(lambda_max / lambda_min, double(k) / kScan);
    double c1, c2;
    double rss = rss_at(lambda, &c1, &c2);
    if (rss < best.rss) {
      best = {c1, c2, lambda, rss, true};
    }
  }
  double step = std::pow(lambda_max / lambda_min, 1.0 / kScan);
  double lo = best.lambda / step, hi = best.lambda * step;
  constexpr double kGolden = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double c1, c2;
  double f1 = rss_at(x1, &c1, &c2), f2 = rss_at(x2, &c1, &c2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = rss_at(x1, &c1, &c2);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = rss_at(x2, &c1, &c2);
    }
  }
  double lambda = 0.5 * (a + b);
  double rss = rss_at(lambda, &c1, &c2);
  if (rss <= best.rss) best = {c1, c2, lambda, rss, true};
  return best;
}

PowerFit fit_power(std::span<const double> t, std::span<const double> y, double alpha_min,
                   double alpha_max) {
  if (t.size() != y.size() || t.size() < 4) {
    throw std::invalid_argument("fit_power needs >= 4 matched points");
  }
  auto rss_at = [&](double alpha, double* c1, double* c2) {
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) g[i] = std::pow(t[i], alpha);
    return two_param_rss(g, y, c1, c2);
  };
  PowerFit best;
  best.rss = std::numeric_limits<double>::infinity();
  const int kScan = 300;
  for (int k = 0; k <= kScan; ++k) {
    double alpha = alpha_min + (alpha_max - alpha_min) * double(k) / kScan;
    double c1, c2;
    double rss = rss_at(alpha, &c1, &c2);
    if (rss < best.rss) best = {c1, c2, alpha, rss};
  }
  double step = (alpha_max - alpha_min) / kScan;
  double a = best.alpha - step, b = best.alpha + step;
  constexpr double kGolden = 0.6180339887498949;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double c1, c2;
  double f1 = rss_at(x1, &c1, &c2), f2 = rss_at(x2, &c1, &c2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = rss_at(x1, &c1, &c2);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = rss_at(x2, &c1, &c2);
    }
  }
  double alpha = 0.5 * (a + b);
  double rss = rss_at(alpha, &c1, &c2);
  if (rss <= best.rss) best = {c1, c2, alpha, rss};
  return best;
}

double runs_test_pvalue(std::span<const double> residuals) {
  int n_pos = 0, n_neg = 0, runs = 0;
  int prev = 0;
  for (double r : residuals) {
    int sign = r >= 0 ? 1 : -1;
    if (sign > 0) {
      ++n_pos;
    } else {
      ++n_neg;
    }
    if (sign != prev) {
      ++runs;
      prev = sign;
    }
  }
  if (n_pos == 0 || n_neg == 0) return 1.0;
  double n = n_pos + n_neg;
  double mu = 2.0 * n_pos * n_neg / n + 1.0;
  double var = (mu - 1.0) * (mu - 2.0) / (n - 1.0);
  if (var <= 0) return 1.0;
  double z = (runs - mu) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace treecode::fit
