#include <cmath>

#include "doctest.h"
#include "qou/quadrature.hpp"

using namespace qou;

TEST_CASE("smooth integrands to tight tolerance") {
  auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.converged);

  auto r2 = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(r2.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("endpoint algebraic singularity via power transform") {
  // int_0^1 x^{-0.8} dx = 5
  auto r = integrate_power_left([](double) { return 1.0; }, -0.8, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-11));

  // int_0^2 x^{-0.5} e^{-x} dx = sqrt(pi) * erf(sqrt(2))
  auto r2 = integrate_power_left([](double x) { return std::exp(-x); }, -0.5, 0.0, 2.0);
  const double expected = std::sqrt(M_PI) * std::erf(std::sqrt(2.0));
  CHECK(r2.value == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("singular integrand without transform still converges adaptively") {
  QuadOptions opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-9;
  opts.max_panels = 20000;
  auto r = integrate([](double x) { return std::pow(x, 0.2) * std::exp(-x); }, 0.0, 40.0, opts);
  // Gamma(1.2)
  CHECK(r.value == doctest::Approx(std::tgamma(1.2)).epsilon(1e-9));
}

TEST_CASE("power tail integration") {
  // int_10^inf s^{-1.6} ds = 10^{-0.6} / 0.6
  auto r = integrate_tail_power([](double) { return 1.0; }, -1.6, 10.0);
  CHECK(r.value == doctest::Approx(std::pow(10.0, -0.6) / 0.6).epsilon(1e-10));

  // int_5^inf s^{-3} (1 + 1/s) ds
  auto r2 = integrate_tail_power([](double s) { return 1.0 + 1.0 / s; }, -3.0, 5.0);
  const double expected = 1.0 / (2 * 25.0) + 1.0 / (3 * 125.0);
  CHECK(r2.value == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("semi-infinite exponential-type integrands") {
  auto r = integrate_to_infinity([](double s) { return std::exp(-2.0 * s); }, 0.0);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-11));
  auto r2 = integrate_to_infinity([](double s) { return s * std::exp(-s); }, 1.0);
  CHECK(r2.value == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-11));
}

TEST_CASE("breakpoints fence off kinks") {
  auto f = [](double x) { return x < 1.0 ? x : 2.0 - x; };
  const double brk[] = {1.0};
  auto r = integrate(f, 0.0, 2.0, {}, brk);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("failure reporting") {
  QuadOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-300;
  opts.max_panels = 8;
  opts.throw_on_failure = false;
  auto r = integrate([](double x) { return std::pow(std::abs(x - 0.7), -0.3); }, 0.0, 1.0, opts);
  CHECK(!r.converged);

  opts.throw_on_failure = true;
  CHECK_THROWS_AS(
      integrate([](double x) { return std::pow(std::abs(x - 0.7), -0.3); }, 0.0, 1.0, opts),
      numeric_error);
}
