#include "flexbid/stats.hpp"

#include <cmath>
#include <limits>

#include "flexbid/errors.hpp"

namespace flexbid {

double mean(const std::vector<double>& v) {
  if (v.empty()) throw DataError("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) throw DataError("sample_sd: need at least 2 samples");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw NumericalError("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

namespace {

// P(T <= t) for Student's t with df degrees of freedom.
double student_cdf(double t, int df) {
  const double v = static_cast<double>(df);
  const double x = v / (v + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * v, 0.5, x);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

}  // namespace

double t_quantile(double tail_prob, int df) {
  if (df < 1) throw UsageError("t_quantile: df must be >= 1");
  if (!(tail_prob > 0.0) || !(tail_prob < 1.0)) {
    throw UsageError("t_quantile: tail probability must lie in (0,1)");
  }
  if (tail_prob > 0.5) return -t_quantile(1.0 - tail_prob, df);
  if (tail_prob == 0.5) return 0.0;
  // Bracket the root of P(T > t) = tail_prob, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (1.0 - student_cdf(hi, df) > tail_prob) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("t_quantile: bracket failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - student_cdf(mid, df) > tail_prob) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

ConfidenceInterval confidence_interval(const std::vector<double>& samples, double level) {
  if (samples.size() < 2) throw DataError("confidence_interval: need at least 2 samples");
  if (!(level > 0.0) || !(level < 1.0)) {
    throw UsageError("confidence_interval: level must lie in (0,1)");
  }
  const auto n = static_cast<double>(samples.size());
  const double m = mean(samples);
  const double s = sample_sd(samples);
  const double t = t_quantile((1.0 - level) / 2.0, static_cast<int>(samples.size()) - 1);
  ConfidenceInterval ci;
  ci.center = m;
  ci.half_width = t * s / std::sqrt(n);
  ci.lo = m - ci.half_width;
  ci.hi = m + ci.half_width;
  return ci;
}

}  // namespace flexbid
