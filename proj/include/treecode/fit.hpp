#pragma once

#include <span>
#include <vector>

namespace treecode::fit {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double rss = 0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Slope of log(y) against log(x).
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

// Three-parameter fit y = plateau + amplitude * lambda^t over t in `x`,
// linear in (plateau, amplitude) at fixed lambda, scanned + refined in lambda.
struct ExpPlateauFit {
  double plateau = 0;
  double amplitude = 0;
  double lambda = 0;
  double rss = 0;
  bool ok = false;
};

ExpPlateauFit fit_exp_plateau(std::span<const double> t, std::span<const double> y,
                              double lambda_min = 1e-4, double lambda_max = 0.9999);

// Three-parameter fit y = c1 + c2 * t^alpha, scanned + refined in alpha.
struct PowerFit {
  double c1 = 0;
  double c2 = 0;
  double alpha = 0;
  double rss = 0;
};

PowerFit fit_power(std::span<const double> t, std::span<const double> y,
                   double alpha_min = 0.3, double alpha_max = 3.0);

// Wald-Wolfowitz runs test on the signs of the residuals; returns the
// two-sided p-value under the normal approximation.
double runs_test_pvalue(std::span<const double> residuals);

}  // namespace treecode::fit
