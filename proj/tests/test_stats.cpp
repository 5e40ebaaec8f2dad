#include <cmath>
#include <vector>

#include "doctest.h"
#include "flexbid/errors.hpp"
#include "flexbid/stats.hpp"

using namespace flexbid;

TEST_CASE("mean and sample standard deviation") {
  CHECK(mean({2.0, 4.0, 9.0}) == doctest::Approx(5.0));
  CHECK(sample_sd({2.0, 4.0, 9.0}) == doctest::Approx(std::sqrt(13.0)));
  CHECK_THROWS_AS(mean({}), DataError);
  CHECK_THROWS_AS(sample_sd({1.0}), DataError);
}

TEST_CASE("regularized incomplete beta on closed-form cases") {
  // I_x(1,1) = x and I_x(2,1) = x^2.
  for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 1.0, x) == doctest::Approx(x * x).epsilon(1e-12));
  }
  // Symmetry: I_x(a,b) = 1 - I_{1-x}(b,a).
  CHECK(incomplete_beta(3.5, 1.25, 0.3) ==
        doctest::Approx(1.0 - incomplete_beta(1.25, 3.5, 0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(incomplete_beta(-1.0, 1.0, 0.5), NumericalError);
}

TEST_CASE("t quantile matches the frozen reference value") {
  // Two-sided 95% with 9 degrees of freedom (tail 0.025 each side).
  CHECK(t_quantile(0.025, 9) == doctest::Approx(2.2621571628540993).epsilon(1e-9));
  CHECK(t_quantile(0.5, 9) == 0.0);
  CHECK(t_quantile(0.975, 9) == doctest::Approx(-2.2621571628540993).epsilon(1e-9));
  // Heavy df approaches the normal quantile.
  CHECK(t_quantile(0.025, 100000) == doctest::Approx(1.9599639845).epsilon(1e-4));
  // Monotone: smaller tail probability, larger quantile.
  CHECK(t_quantile(0.01, 9) > t_quantile(0.05, 9));
  CHECK_THROWS_AS(t_quantile(0.0, 9), UsageError);
  CHECK_THROWS_AS(t_quantile(0.025, 0), UsageError);
}

TEST_CASE("confidence interval matches the frozen reference on 1..10") {
  std::vector<double> x;
  for (int i = 1; i <= 10; ++i) x.push_back(i);
  const auto ci = confidence_interval(x);
  CHECK(ci.lo == doctest::Approx(3.3341494102783162).epsilon(1e-9));
  CHECK(ci.hi == doctest::Approx(7.665850589721684).epsilon(1e-9));
  CHECK(ci.center == doctest::Approx(5.5));
  CHECK(ci.hi - ci.lo == doctest::Approx(2.0 * ci.half_width));
}

TEST_CASE("confidence interval degenerates to a point for constant data") {
  const auto ci = confidence_interval({4.2, 4.2, 4.2, 4.2});
  CHECK(ci.lo == 4.2);
  CHECK(ci.hi == 4.2);
  CHECK_THROWS_AS(confidence_interval({1.0}), DataError);
  CHECK_THROWS_AS(confidence_interval({1.0, 2.0}, 1.5), UsageError);
}

TEST_CASE("interval width shrinks like 1/sqrt(n)") {
  // Same sample variance at two sizes: alternate two values.
  std::vector<double> small, big;
  for (int i = 0; i < 16; ++i) small.push_back(i % 2 ? 1.0 : -1.0);
  for (int i = 0; i < 256; ++i) big.push_back(i % 2 ? 1.0 : -1.0);
  const double ratio =
      confidence_interval(small).half_width / confidence_interval(big).half_width;
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}
