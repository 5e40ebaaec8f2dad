#pragma once

#include <vector>

namespace flexbid {

double mean(const std::vector<double>& v);

// Sample standard deviation with the n-1 denominator.
double sample_sd(const std::vector<double>& v);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz). Accurate to ~1e-14 for moderate a, b.
double incomplete_beta(double a, double b, double x);

// Positive critical value t such that P(T > t) = tail_prob for Student's t
// with df degrees of freedom (tail_prob < 0.5 gives t > 0; solved by
// bisection on the incomplete-beta CDF to ~1e-12 absolute).
double t_quantile(double tail_prob, int df);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  double half_width = 0.0;
};

// Two-sided t-based interval: mean +/- t_{(1-level)/2, n-1} * s / sqrt(n).
ConfidenceInterval confidence_interval(const std::vector<double>& samples, double level = 0.95);

}  // namespace flexbid
