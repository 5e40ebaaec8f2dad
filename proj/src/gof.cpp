#include "flexbid/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexbid/errors.hpp"

namespace flexbid {

double ecdf(const std::vector<double>& samples, double x) {
  if (samples.empty()) throw DataError("ecdf: empty sample");
  std::size_t count = 0;
  for (double s : samples) {
    if (s <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

namespace {

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) *
                                 lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_test(const std::vector<double>& samples,
                 const std::function<double(double)>& reference_cdf) {
  if (samples.empty()) throw DataError("ks_test: empty sample");
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = reference_cdf(sorted[i]);
    const double upper = static_cast<double>(i + 1) / dn - f;  // ECDF steps above F
    const double lower = f - static_cast<double>(i) / dn;      // F above ECDF's left limit
    d = std::max(d, std::max(upper, lower));
  }
  KsResult result;
  result.d_n = d;
  result.n = n;
  const double root_n = std::sqrt(dn);
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * d;
  result.p_value = kolmogorov_q(lambda);
  return result;
}

std::vector<std::size_t> nll_compare(const std::vector<double>& nll_values) {
  std::vector<std::size_t> order(nll_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nll_values[a] < nll_values[b];
  });
  return order;
}

}  // namespace flexbid
