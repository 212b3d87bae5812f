#include <doctest.h>

#include <cmath>
#include <random>

#include "tzlab/log_real.hpp"

using namespace tzlab;

TEST_SUITE("log_real") {
  TEST_CASE("log_factorial matches exact small values and lgamma") {
    long double f = 1;
    for (int n = 0; n <= 25; ++n) {
      if (n > 0) f *= n;
      CHECK(std::fabs(log_factorial(n) - std::log(f)) < 1e-15L * std::max(1.0L, std::log(f)));
    }
    for (std::int64_t n : {30, 100, 171, 1000, 12345, 1000000}) {
      const long double ref = std::lgamma(static_cast<long double>(n) + 1);
      CHECK(std::fabs(log_factorial(n) - ref) <= 1e-17L * ref + 1e-15L);
    }
    CHECK_THROWS(log_factorial(-1));
  }

  TEST_CASE("arithmetic agrees with plain doubles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 200; ++i) {
      const double a = U(rng), b = U(rng);
      const LogReal A = LogReal::from_value(a), B = LogReal::from_value(b);
      CHECK((A * B).to_double() == doctest::Approx(a * b).epsilon(1e-13));
      CHECK((A / B).to_double() == doctest::Approx(a / b).epsilon(1e-13));
      CHECK((A + B).to_double() == doctest::Approx(a + b).epsilon(1e-12).scale(std::fabs(a) + std::fabs(b)));
      CHECK((A - B).to_double() == doctest::Approx(a - b).epsilon(1e-12).scale(std::fabs(a) + std::fabs(b)));
    }
    CHECK((LogReal::from_value(2.5) - LogReal::from_value(2.5)).is_zero());
    CHECK(LogReal{}.log_abs() == -INFINITY);
  }

  TEST_CASE("huge magnitudes stay finite in log space") {
    const LogReal big = LogReal::from_log(1e5L);
    const LogReal sum = big + big;
    CHECK(std::fabs(sum.log_abs() - (1e5L + std::log(2.0L))) < 1e-12L);
    CHECK(std::fabs((big * big).log_abs() - 2e5L) < 1e-9L);
    CHECK(std::fabs(big.pow(0.5L).log_abs() - 5e4L) < 1e-9L);
  }

  TEST_CASE("LogSumExp equals the direct sum") {
    LogSumExp s;
    long double direct = 0;
    for (int i = 1; i <= 50; ++i) {
      s.add_log(std::log(static_cast<long double>(i)));
      direct += i;
    }
    CHECK(s.count() == 50);
    CHECK(std::fabs(s.result().value() / direct - 1) < 1e-15L);
    LogSumExp empty;
    CHECK(empty.result().is_zero());
  }

  TEST_CASE("LogComplex polar round trip") {
    const auto c = LogComplex::from_log_polar(std::log(3.0L), std::polar(1.0, 0.7));
    CHECK(std::abs(c.value() - std::polar(3.0L, 0.7L)) < 1e-14L);
    CHECK(LogComplex::zero().is_zero());
  }
}
