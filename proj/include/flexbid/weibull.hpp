#pragma once

#include <vector>

#include "flexbid/rng.hpp"

namespace flexbid {

// Two-parameter Weibull in the (kappa, gamma) parameterization:
//   pdf f(x) = kappa * gamma * x^(gamma-1) * exp(-kappa * x^gamma), x > 0.
struct WeibullParams {
  double kappa = 0.0;  // scale-like rate parameter, > 0
  double gamma = 0.0;  // shape parameter, > 0
};

// Search grid for the one-dimensional gamma optimization; log-spaced.
struct GammaGrid {
  double lo = 0.05;
  double hi = 5.0;
  int steps = 200;
};

struct WeibullFit {
  WeibullParams params;
  double loglik = 0.0;    // profile log-likelihood at the optimum
  bool boundary = false;  // argmax hit a grid edge: widen the grid
};

// Linear-interpolation empirical quantile at 1-based position 1 + (n-1)*eps.
// Chosen so that a 216-sample set has exactly 22 points strictly below the
// 0.1-quantile. Requires n >= 2 and eps in (0,1).
double empirical_quantile(std::vector<double> samples, double eps);

// Lower-tail transform: x_i = threshold - r_i for every r_i strictly below
// the threshold; all outputs strictly positive. Throws if the tail is empty.
std::vector<double> extract_tail(const std::vector<double>& samples, double threshold);

// Closed-form MLE of kappa given gamma: n / sum(x_i^gamma). All x > 0.
double kappa_hat(const std::vector<double>& x, double gamma);

// Profile log-likelihood with kappa concentrated out:
//   l(gamma) = n*(log n - log sum(x^gamma) + log gamma - 1) + (gamma-1)*sum(log x)
double profile_loglik(const std::vector<double>& x, double gamma);

// Maximizes the profile log-likelihood over the grid, then refines the best
// cell by golden-section search to relative tolerance 1e-8. Needs >= 2
// strictly positive samples. Values are normalized by their maximum
// internally for conditioning; reported parameters refer to the input scale.
WeibullFit fit_weibull_mle(const std::vector<double>& x, const GammaGrid& grid = {});

// F(x) = 1 - exp(-kappa * x^gamma) for x >= 0, 0 for x < 0.
double weibull_cdf(const WeibullParams& p, double x);

// Survival 1 - F(x) for x >= 0; by convention 0 for x < 0 (the tail model is
// only defined on the positive half-line).
double weibull_survival(const WeibullParams& p, double x);

// Inverse-CDF sampling.
double weibull_sample(const WeibullParams& p, Rng& rng);

}  // namespace flexbid
