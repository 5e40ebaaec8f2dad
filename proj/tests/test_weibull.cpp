#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flexbid/errors.hpp"
#include "flexbid/rng.hpp"
#include "flexbid/weibull.hpp"

using namespace flexbid;

namespace {

std::vector<double> weibull_draws(const WeibullParams& p, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = weibull_sample(p, rng);
  return x;
}

}  // namespace

TEST_CASE("empirical quantile interpolates between order statistics") {
  std::vector<double> one_to_ten;
  for (int i = 1; i <= 10; ++i) one_to_ten.push_back(i);
  CHECK(empirical_quantile(one_to_ten, 0.5) == doctest::Approx(5.5));
  CHECK(empirical_quantile({2, 4, 6, 8}, 0.25) == doctest::Approx(3.5));
  // Order must not matter.
  CHECK(empirical_quantile({8, 2, 6, 4}, 0.25) == doctest::Approx(3.5));
  CHECK_THROWS_AS(empirical_quantile({1.0}, 0.5), DataError);
  CHECK_THROWS_AS(empirical_quantile({1.0, 2.0}, 0.0), UsageError);
  CHECK_THROWS_AS(empirical_quantile({1.0, 2.0}, 1.0), UsageError);
}

TEST_CASE("216 continuous samples leave exactly 22 points in the lower tail") {
  Rng rng(99);
  std::vector<double> r(216);
  for (auto& v : r) v = rng.uniform(10.0, 50.0);
  const double q = empirical_quantile(r, 0.1);
  const auto tail = extract_tail(r, q);
  CHECK(tail.size() == 22);
  for (double x : tail) CHECK(x > 0.0);
}

TEST_CASE("tail transform flips values around the threshold") {
  const auto tail = extract_tail({7.0, 12.0, 9.5}, 10.0);
  REQUIRE(tail.size() == 2);
  CHECK(tail[0] == doctest::Approx(3.0));
  CHECK(tail[1] == doctest::Approx(0.5));
  // Values equal to the threshold are not part of the tail.
  CHECK(extract_tail({7.0, 10.0}, 10.0).size() == 1);
  CHECK_THROWS_AS(extract_tail({5.0, 5.0}, 5.0), DataError);
}

TEST_CASE("kappa_hat closed form") {
  CHECK(kappa_hat({1, 1, 1, 1}, 1.0) == doctest::Approx(1.0));
  CHECK(kappa_hat({2, 2}, 2.0) == doctest::Approx(0.25));
  CHECK(kappa_hat({0.5, 1.5, 2.5}, 1.0) == doctest::Approx(3.0 / 4.5));
  CHECK_THROWS_AS(kappa_hat({1.0, -1.0}, 1.0), DataError);
  CHECK_THROWS_AS(kappa_hat({1.0}, 0.0), UsageError);
}

TEST_CASE("kappa_hat satisfies the score equation sum(kappa x^gamma) = n") {
  Rng rng(4);
  std::vector<double> x(50);
  for (auto& v : x) v = rng.uniform(0.1, 8.0);
  for (double gamma : {0.3, 1.0, 2.7}) {
    const double k = kappa_hat(x, gamma);
    double acc = 0.0;
    for (double v : x) acc += k * std::pow(v, gamma);
    CHECK(acc == doctest::Approx(50.0).epsilon(1e-12));
  }
}

TEST_CASE("profile log-likelihood closed-form values") {
  CHECK(profile_loglik({1, 1, 1}, 2.0) == doctest::Approx(3.0 * (std::log(2.0) - 1.0)));
  CHECK(profile_loglik({1.0}, 1.0) == doctest::Approx(-1.0));
  CHECK(profile_loglik({0.5, 2.0}, 1.0) == doctest::Approx(-2.4462871026284194).epsilon(1e-14));
  CHECK_THROWS_AS(profile_loglik({0.5, -2.0}, 1.0), DataError);
  CHECK_THROWS_AS(profile_loglik({0.5, 2.0}, -1.0), UsageError);
}

TEST_CASE("profile log-likelihood shifts by -n log c under scaling") {
  Rng rng(8);
  std::vector<double> x(30), scaled(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = rng.uniform(0.05, 4.0);
    scaled[i] = 3.7 * x[i];
  }
  const double expected_shift = -30.0 * std::log(3.7);
  for (double gamma : {0.2, 0.9, 1.7, 3.1}) {
    CHECK(profile_loglik(scaled, gamma) - profile_loglik(x, gamma) ==
          doctest::Approx(expected_shift).epsilon(1e-10));
  }
}

TEST_CASE("MLE recovers known parameters from a large sample") {
  const WeibullParams truth{2.0, 1.5};
  const auto x = weibull_draws(truth, 10000, 31);
  const WeibullFit fit = fit_weibull_mle(x);
  CHECK(!fit.boundary);
  CHECK(fit.params.gamma == doctest::Approx(1.5).epsilon(0.05));
  CHECK(fit.params.kappa == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("grid-plus-refinement matches an independent dense grid scan") {
  const auto x = weibull_draws({0.7, 2.2}, 1500, 55);
  const WeibullFit fit = fit_weibull_mle(x);
  // Oracle: brute-force over 4000 log-spaced gammas in the same range.
  double best_gamma = 0.0, best_ll = -1e300;
  for (int i = 0; i < 4000; ++i) {
    const double g =
        0.05 * std::pow(5.0 / 0.05, static_cast<double>(i) / 3999.0);
    const double ll = profile_loglik(x, g);
    if (ll > best_ll) {
      best_ll = ll;
      best_gamma = g;
    }
  }
  const double grid_step = best_gamma * (std::pow(5.0 / 0.05, 1.0 / 3999.0) - 1.0);
  CHECK(std::abs(fit.params.gamma - best_gamma) <= 2.0 * grid_step);
  CHECK(fit.loglik >= best_ll - 1e-9);
}

TEST_CASE("constant data pushes the shape estimate to the grid edge") {
  const WeibullFit fit = fit_weibull_mle({1.0, 1.0, 1.0, 1.0});
  CHECK(fit.boundary);
  CHECK_THROWS_AS(fit_weibull_mle({1.0}), NumericalError);
  CHECK_THROWS_AS(fit_weibull_mle({1.0, 0.0}), DataError);
}

TEST_CASE("shape estimate is invariant under rescaling of the data") {
  const auto x = weibull_draws({1.3, 0.8}, 800, 77);
  std::vector<double> scaled(x.size());
  std::transform(x.begin(), x.end(), scaled.begin(), [](double v) { return 25.0 * v; });
  const WeibullFit f1 = fit_weibull_mle(x);
  const WeibullFit f2 = fit_weibull_mle(scaled);
  CHECK(f2.params.gamma == doctest::Approx(f1.params.gamma).epsilon(1e-6));
  // Scale family: kappa transforms as kappa / c^gamma.
  CHECK(f2.params.kappa ==
        doctest::Approx(f1.params.kappa / std::pow(25.0, f1.params.gamma)).epsilon(1e-4));
}

TEST_CASE("fit error shrinks as the sample grows") {
  double err_small = 0.0, err_large = 0.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const WeibullParams truth{1.0, 1.2};
    const auto rel = [&](int n) {
      const WeibullFit f = fit_weibull_mle(weibull_draws(truth, n, seed));
      return std::abs(f.params.gamma - truth.gamma) / truth.gamma +
             std::abs(f.params.kappa - truth.kappa) / truth.kappa;
    };
    err_small += rel(100);
    err_large += rel(10000);
  }
  CHECK(err_large < err_small);
}

TEST_CASE("cdf and survival honor the stated conventions") {
  CHECK(weibull_cdf({1.0, 1.0}, std::log(2.0)) == doctest::Approx(0.5));
  CHECK(weibull_cdf({0.25, 2.0}, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(weibull_cdf({2.0, 1.5}, 0.0) == 0.0);
  CHECK(weibull_survival({2.0, 1.5}, 0.0) == 1.0);
  // Negative support: both functions are pinned to zero by convention.
  CHECK(weibull_cdf({2.0, 1.5}, -1.0) == 0.0);
  CHECK(weibull_survival({2.0, 1.5}, -1.0) == 0.0);
  double prev = -1.0;
  for (double x = 0.0; x <= 5.0; x += 0.25) {
    const double c = weibull_cdf({0.8, 1.7}, x);
    CHECK(c >= prev);
    CHECK(c + weibull_survival({0.8, 1.7}, x) == doctest::Approx(1.0).epsilon(1e-12));
    prev = c;
  }
}

TEST_CASE("sampler agrees with the cdf it inverts") {
  const WeibullParams p{0.6, 2.4};
  const auto x = weibull_draws(p, 2000, 13);
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = weibull_cdf(p, sorted[i]);
    const double lo = static_cast<double>(i) / sorted.size();
    const double hi = static_cast<double>(i + 1) / sorted.size();
    worst = std::max({worst, f - lo, hi - f});
  }
  CHECK(worst < 0.05);
  CHECK(*std::min_element(x.begin(), x.end()) > 0.0);
}
