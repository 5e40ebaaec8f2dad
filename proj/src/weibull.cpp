#include "flexbid/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexbid/errors.hpp"

namespace flexbid {

double empirical_quantile(std::vector<double> samples, double eps) {
  if (samples.size() < 2) throw DataError("empirical_quantile: need at least 2 samples");
  if (!(eps > 0.0) || !(eps < 1.0)) throw UsageError("empirical_quantile: eps must lie in (0,1)");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  const double h = 1.0 + static_cast<double>(n - 1) * eps;  // 1-based position
  const auto lo = static_cast<std::size_t>(h);              // floor, >= 1
  const double frac = h - static_cast<double>(lo);
  if (lo >= n) return samples[n - 1];
  return samples[lo - 1] + frac * (samples[lo] - samples[lo - 1]);
}

std::vector<double> extract_tail(const std::vector<double>& samples, double threshold) {
  std::vector<double> tail;
  for (double r : samples) {
    if (r < threshold) tail.push_back(threshold - r);
  }
  if (tail.empty()) {
    throw DataError("extract_tail: no samples strictly below the threshold");
  }
  return tail;
}

double kappa_hat(const std::vector<double>& x, double gamma) {
  if (x.empty()) throw DataError("kappa_hat: empty sample");
  if (!(gamma > 0.0)) throw UsageError("kappa_hat: gamma must be > 0");
  double s = 0.0;
  for (double xi : x) {
    if (!(xi > 0.0)) throw DataError("kappa_hat: all samples must be > 0");
    s += std::pow(xi, gamma);
  }
  return static_cast<double>(x.size()) / s;
}

double profile_loglik(const std::vector<double>& x, double gamma) {
  if (x.empty()) throw DataError("profile_loglik: empty sample");
  if (!(gamma > 0.0)) throw UsageError("profile_loglik: gamma must be > 0");
  const auto n = static_cast<double>(x.size());
  double sum_pow = 0.0;
  double sum_log = 0.0;
  for (double xi : x) {
    if (!(xi > 0.0)) throw DataError("profile_loglik: all samples must be > 0");
    sum_pow += std::pow(xi, gamma);
    sum_log += std::log(xi);
  }
  const double value =
      n * (std::log(n) - std::log(sum_pow) + std::log(gamma) - 1.0) + (gamma - 1.0) * sum_log;
  if (!std::isfinite(value)) {
    throw NumericalError("profile_loglik: overflow at gamma = " + std::to_string(gamma));
  }
  return value;
}

WeibullFit fit_weibull_mle(const std::vector<double>& x, const GammaGrid& grid) {
  if (x.size() < 2) throw NumericalError("fit_weibull_mle: need at least 2 tail samples");
  if (!(grid.lo > 0.0) || !(grid.hi > grid.lo) || grid.steps < 2) {
    throw UsageError("fit_weibull_mle: invalid gamma grid");
  }
  // Normalize by the max so sum(x^gamma) stays bounded for large gamma. The
  // argmax over gamma is unchanged (scale family); parameters are mapped
  // back to the input scale afterwards.
  double scale = 0.0;
  for (double xi : x) {
    if (!(xi > 0.0)) throw DataError("fit_weibull_mle: all samples must be > 0");
    scale = std::max(scale, xi);
  }
  std::vector<double> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x[i] / scale;

  const double log_ratio = std::log(grid.hi / grid.lo);
  auto grid_gamma = [&](int j) {
    return grid.lo * std::exp(log_ratio * static_cast<double>(j) /
                              static_cast<double>(grid.steps - 1));
  };
  int best_j = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.steps; ++j) {
    const double val = profile_loglik(xs, grid_gamma(j));
    if (val > best_val) {
      best_val = val;
      best_j = j;
    }
  }
  const bool boundary = (best_j == 0 || best_j == grid.steps - 1);

  // Golden-section refinement inside the bracketing cell.
  double a = grid_gamma(std::max(0, best_j - 1));
  double b = grid_gamma(std::min(grid.steps - 1, best_j + 1));
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = profile_loglik(xs, c);
  double fd = profile_loglik(xs, d);
  while (b - a > 1e-8 * (0.5 * (a + b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = profile_loglik(xs, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = profile_loglik(xs, d);
    }
  }
  const double gamma = 0.5 * (a + b);

  WeibullFit fit;
  fit.params.gamma = gamma;
  fit.params.kappa = kappa_hat(x, gamma);  // input scale
  fit.loglik = profile_loglik(x, gamma);
  fit.boundary = boundary;
  if (!std::isfinite(fit.params.kappa) || !(fit.params.kappa > 0.0)) {
    throw NumericalError("fit_weibull_mle: kappa estimate is not finite/positive");
  }
  return fit;
}

double weibull_cdf(const WeibullParams& p, double x) {
  if (x < 0.0) return 0.0;
  return -std::expm1(-p.kappa * std::pow(x, p.gamma));
}

double weibull_survival(const WeibullParams& p, double x) {
  if (x < 0.0) return 0.0;  // tail model undefined left of the origin
  return std::exp(-p.kappa * std::pow(x, p.gamma));
}

double weibull_sample(const WeibullParams& p, Rng& rng) {
  double u = rng.uniform01();
  // Guard the measure-zero u = 0 so logs stay finite downstream.
  if (u <= 0.0) u = std::numeric_limits<double>::min();
  return std::pow(-std::log(u) / p.kappa, 1.0 / p.gamma);
}

}  // namespace flexbid
