#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "geometry.hpp"
#include "quadrature.hpp"

using namespace projlab;

TEST_CASE("adaptive simpson on smooth integrands") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("power-singular quadrature") {
  // int_0^1 x^t dx = 1/(1+t) exactly
  for (double t : {-0.9, -0.5, -0.1}) {
    double got = quad_power_singular([](double) { return 1.0; }, t, 0.0, 0.0, 1.0);
    CHECK(got == doctest::Approx(1.0 / (1.0 + t)).epsilon(1e-12));
  }
  // int_{-1}^{1} |x|^{-1/2} cos(x) dx, straddling the singularity;
  // reference value from a substitution x = u^2: 4 int_0^1 cos(u^2) du
  double ref = 4.0 * adaptive_simpson([](double u) { return std::cos(u * u); }, 0.0, 1.0, 1e-13);
  double got = quad_power_singular([](double x) { return std::cos(x); }, -0.5, 0.0, -1.0, 1.0);
  CHECK(got == doctest::Approx(ref).epsilon(1e-10));

  CHECK_THROWS_AS(quad_power_singular([](double) { return 1.0; }, -1.0, 0.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("abs-sin-power integrals against the Gamma closed form") {
  for (double t : {-0.75, -0.5, -0.25, -0.05}) {
    double full = integral_abs_sin_pow(t, 0.0, kPi);
    double gamma_value = kPi * lambda_constant_gamma(t);
    CHECK(full == doctest::Approx(gamma_value).epsilon(1e-10));
    // splitting across zeros of sin
    double split = integral_abs_sin_pow(t, -kPi / 3, kPi / 2);
    double a = integral_abs_sin_pow(t, -kPi / 3, 0.0);
    double b = integral_abs_sin_pow(t, 0.0, kPi / 2);
    CHECK(split == doctest::Approx(a + b).epsilon(1e-11));
  }
  CHECK(integral_abs_sin_pow(0.0, 0.2, 1.5) == doctest::Approx(1.3));
}

TEST_CASE("lambda constant") {
  CHECK(lambda_constant(0.0) == doctest::Approx(1.0));
  // quadrature ladder: values decrease to 1 as t -> 0^-
  CHECK(lambda_constant(-0.5) == doctest::Approx(1.669253683348) /* (2/pi) int sin^{-1/2} */
                                     .epsilon(1e-9));
  CHECK(lambda_constant(-0.5) == doctest::Approx(lambda_constant_gamma(-0.5)).epsilon(1e-10));
  double prev = lambda_constant(-0.8);
  for (double t : {-0.4, -0.2, -0.1, -0.05}) {
    double cur = lambda_constant(t);
    CHECK(cur < prev);
    CHECK(cur > 1.0);
    prev = cur;
  }
  CHECK_THROWS_AS(lambda_constant(-1.0), std::invalid_argument);
}

TEST_CASE("riemann zeta") {
  CHECK(riemann_zeta(2.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-13));
  CHECK(riemann_zeta(4.0) == doctest::Approx(std::pow(kPi, 4) / 90.0).epsilon(1e-13));
  CHECK(riemann_zeta(0.5) == doctest::Approx(-1.4603545088095868).epsilon(1e-12));
  CHECK(riemann_zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-13));
}
