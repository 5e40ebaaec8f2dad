#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace flexbid {

struct KsResult {
  double d_n = 0.0;      // max |ECDF - reference CDF| gap
  double p_value = 1.0;  // asymptotic Kolmogorov p-value, small-sample corrected
  std::size_t n = 0;
};

// Empirical CDF: fraction of samples <= x (right-continuous).
double ecdf(const std::vector<double>& samples, double x);

// One-sample Kolmogorov-Smirnov test of `samples` against a reference CDF.
// d_n is computed exactly from the order statistics; the p-value uses the
// asymptotic Kolmogorov series at lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n))*d_n,
// truncated once terms fall below 1e-12.
KsResult ks_test(const std::vector<double>& samples,
                 const std::function<double(double)>& reference_cdf);

// Indices of `nll_values` sorted ascending (lower NLL = better fit); ties
// keep input order.
std::vector<std::size_t> nll_compare(const std::vector<double>& nll_values);

}  // namespace flexbid
