#include <cmath>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "lambert.hpp"
#include "oracles.hpp"

TEST_CASE("lambert w at exact anchor points") {
  CHECK(dtn::lambert_w0(0.0) == 0.0);
  CHECK(dtn::lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dtn::lambert_w0(1.0) == doctest::Approx(0.567143290409783873).epsilon(1e-12));
}

TEST_CASE("lambert w rejects negative arguments") {
  CHECK_THROWS_AS(dtn::lambert_w0(-0.1), dtn::invalid_parameter_error);
  CHECK_THROWS_AS(dtn::lambert_w0(-100.0), dtn::invalid_parameter_error);
}

TEST_CASE("lambert w agrees with a bisection oracle") {
  for (double x : {1e-9, 0.004, 0.3, 1.7, 9.0, 450.0, 2.4e7, 8.8e11}) {
    const double w = dtn::lambert_w0(x);
    CHECK(w == doctest::Approx(oracle::lambert_bisection(x)).epsilon(1e-10));
  }
}

TEST_CASE("lambert w roundtrip residual over log-spaced arguments") {
  const int points = 10000;
  const double lo = std::log(1e-12);
  const double hi = std::log(1e6);
  for (int i = 0; i < points; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (points - 1.0));
    const double w = dtn::lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-10 * std::max(1.0, x));
  }
}

TEST_CASE("lambert w is monotone nondecreasing") {
  double prev = dtn::lambert_w0(0.0);
  for (double x = 1e-12; x < 1e8; x *= 3.7) {
    const double w = dtn::lambert_w0(x);
    CHECK(w >= prev);
    prev = w;
  }
}

TEST_CASE("log-argument form matches the direct form and extends past overflow") {
  for (double x : {10.0, 1e5, 1e12}) {
    CHECK(dtn::detail::lambert_w0_from_log(std::log(x)) ==
          doctest::Approx(dtn::lambert_w0(x)).epsilon(1e-12));
  }
  // log x = 1000: x itself overflows a double, the solution does not.
  const double w = dtn::detail::lambert_w0_from_log(1000.0);
  CHECK(w + std::log(w) == doctest::Approx(1000.0).epsilon(1e-12));
}
