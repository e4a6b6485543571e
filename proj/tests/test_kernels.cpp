#include <cmath>
#include <vector>

#include "doctest.h"
#include "qou/kernels.hpp"
#include "qou/quadrature.hpp"

using namespace qou;

TEST_CASE("c_H at one half is exactly one") {
  CHECK(c_H_constant(0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("c_H stays finite and positive across (0,1)") {
  for (double H = 0.005; H < 1.0; H += 0.005) {
    const double c = c_H_constant(H);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
  }
  CHECK_THROWS_AS(c_H_constant(0.0), parameter_error);
  CHECK_THROWS_AS(c_H_constant(1.0), parameter_error);
}

TEST_CASE("indicator kernel transform is the exponential") {
  auto k = KernelSpec::indicator();
  CHECK(psi_value(k, 1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(psi_value(k, 2.0, 3.0) == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
  // quadrature branch agrees with the closed form
  for (double t : {0.1, 0.5, 1.0, 4.0, 20.0}) {
    CHECK(std::abs(psi_value_generic(k, 1.0, t) - std::exp(-t)) < 1e-10);
  }
}

TEST_CASE("support convention: psi vanishes on negative times") {
  for (const auto& k : {KernelSpec::indicator(), KernelSpec::power(1.0, 0.2),
                        KernelSpec::trunc_power(1.0, 0.5, 0.7)}) {
    CHECK(psi_value(k, 1.0, -1.0) == 0.0);
    CHECK(psi_value(k, 1.0, -1e-12) == 0.0);
  }
}

TEST_CASE("power kernel transform matches its large-t asymptote") {
  const double H = 0.7, lambda = 1.0;
  const double cH = c_H_constant(H);
  auto k = KernelSpec::power(cH, H - 0.5);
  const double t = 100.0;
  const double psi = psi_value(k, lambda, t);
  const double predicted = cH * (H - 0.5) / lambda * std::pow(t, H - 1.5);
  CHECK(psi / predicted == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("direct and integration-by-parts branches agree") {
  auto k = KernelSpec::power(1.3, -0.2);
  const double lambda = 1.0;
  // threshold sits at lambda*t = 60
  for (double t : {55.0, 59.9, 60.1, 70.0}) {
    const double direct = k.value(t) - lambda * psi_weighted_integral(k, lambda, t);
    CHECK(psi_value(k, lambda, t) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("psi tail asymptote variants") {
  const double H = 0.7;
  const double cH = c_H_constant(H);
  auto t1 = psi_tail_asymptote(KernelSpec::power(cH, H - 0.5), 2.0);
  CHECK(!t1.exponential);
  CHECK(t1.exponent == doctest::Approx(-0.8));
  CHECK(t1.constant == doctest::Approx(cH * 0.2 / 2.0));

  auto t2 = psi_tail_asymptote(KernelSpec::indicator(), 1.0);
  CHECK(t2.exponential);

  auto k3 = KernelSpec::trunc_power(1.0, 1.0, 0.7);
  auto t3 = psi_tail_asymptote(k3, 1.0);
  CHECK(t3.exponent == doctest::Approx(-0.8));
  CHECK(t3.constant == doctest::Approx(0.2));
  const double t = 200.0;
  CHECK(psi_value(k3, 1.0, t) / (t3.constant * std::pow(t, t3.exponent)) ==
        doctest::Approx(1.0).epsilon(0.02));

  TabulatedKernel tab;
  tab.knots = {0.0, 1.0};
  tab.values = {1.0, 1.0};
  CHECK_THROWS_AS(psi_tail_asymptote(KernelSpec::tabulated(tab), 1.0), parameter_error);
}

TEST_CASE("trunc_power with delta=0 is the power kernel, same code path") {
  auto a = KernelSpec::trunc_power(1.7, 0.0, 0.3);
  auto b = KernelSpec::power(1.7, -0.2);
  CHECK(a.kind() == KernelSpec::Kind::power);
  for (double t : {0.01, 0.5, 3.0, 40.0, 300.0})
    CHECK(psi_value(a, 1.0, t) == psi_value(b, 1.0, t));
}

TEST_CASE("psi at 0+ matches f at 0+ for kernels continuous at zero") {
  auto k = KernelSpec::trunc_power(2.0, 0.5, 0.7);
  const double f0 = 2.0 * std::pow(0.5, 0.2);
  CHECK(psi_value(k, 1.0, 1e-9) == doctest::Approx(f0).epsilon(1e-6));
  CHECK(psi_value(KernelSpec::indicator(), 3.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linearity: coefficient scaling and bump subtraction") {
  auto f = KernelSpec::power(1.0, 0.2);
  auto f2 = KernelSpec::power(2.0, 0.2);
  TabulatedKernel bump;
  bump.knots = {0.0, 1.0};
  bump.values = {1.0, 1.0};
  auto fp = KernelSpec::perturbed(f, bump);
  auto bump_only = KernelSpec::tabulated(bump);
  for (double t : {0.05, 0.4, 0.99, 1.5, 10.0}) {
    CHECK(psi_value(f2, 1.0, t) == doctest::Approx(2.0 * psi_value(f, 1.0, t)).epsilon(1e-9));
    CHECK(psi_value(fp, 1.0, t) ==
          doctest::Approx(psi_value(f, 1.0, t) - psi_value(bump_only, 1.0, t)).epsilon(1e-10));
  }
}

TEST_CASE("tabulated transform agrees with generic quadrature") {
  TabulatedKernel tab;
  tab.knots = {0.0, 0.5, 1.0, 2.0};
  tab.values = {1.0, 2.0, 0.5, 0.0};
  auto k = KernelSpec::tabulated(tab);
  for (double t : {0.3, 0.75, 1.5, 2.5, 6.0}) {
    CHECK(psi_value(k, 1.3, t) == doctest::Approx(psi_value_generic(k, 1.3, t)).epsilon(1e-9));
  }
  // beyond compact support psi decays exponentially
  CHECK(std::abs(psi_value(k, 1.3, 30.0)) < std::abs(psi_value(k, 1.3, 10.0)) * 1e-9);
}

TEST_CASE("cancellation integral: indicator control equals 1/lambda") {
  auto rep = cancellation_integral(KernelSpec::indicator(), 2.0, 40.0);
  // f does not vanish at infinity: the limit is 1/lambda, not zero
  CHECK(rep.closed_form == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.direct == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("cancellation integral: direct and closed forms agree") {
  auto rep = cancellation_integral(KernelSpec::power(1.0, 0.2), 1.0, 50.0);
  CHECK(rep.direct == doctest::Approx(rep.closed_form).epsilon(1e-8));
}

TEST_CASE("cancellation decay for a vanishing kernel (oracle values)") {
  // H = 0.3 fractional kernel: the partial integral decays like T^{-0.2},
  // so at T = 1000 the measured ratio against int |psi| sits near 0.17.
  auto k = KernelSpec::power(1.0, -0.2);
  auto rep = cancellation_integral(k, 1.0, 1000.0);
  CHECK(rep.closed_form == doctest::Approx(0.2512389).epsilon(1e-4));
  CHECK(rep.direct == doctest::Approx(rep.closed_form).epsilon(1e-6));
  CHECK(rep.absolute == doctest::Approx(1.46126).epsilon(1e-3));
  const double ratio = std::abs(rep.direct) / rep.absolute;
  CHECK(ratio == doctest::Approx(0.17193).epsilon(2e-3));

  // |int_0^T psi| decreases beyond its turning point and tends to zero
  double prev = std::abs(cancellation_integral(k, 1.0, 10.0).closed_form);
  for (double T : {100.0, 1000.0, 10000.0}) {
    const double cur = std::abs(cancellation_integral(k, 1.0, T).closed_form);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("cell averages integrate psi exactly") {
  auto k = KernelSpec::power(1.0, -0.2);
  const double lambda = 1.0, dt = 0.125;
  auto avg = psi_cell_averages(k, lambda, dt, 32);
  // running integral of psi equals the weighted-integral identity
  double acc = 0.0;
  for (std::size_t i = 0; i < avg.size(); ++i) acc += avg[i] * dt;
  CHECK(acc == doctest::Approx(psi_weighted_integral(k, lambda, 32 * dt)).epsilon(1e-10));
  // and each cell average matches direct quadrature of psi over the cell
  for (std::size_t i : {std::size_t(0), std::size_t(3), std::size_t(31)}) {
    auto q = integrate([&](double s) { return psi_value(k, lambda, s); }, i * dt, (i + 1) * dt,
                       {}, std::vector<double>{});
    CHECK(avg[i] == doctest::Approx(q.value / dt).epsilon(1e-6));
  }
}

TEST_CASE("kernel cell averages telescope the cumulative") {
  auto k = KernelSpec::trunc_power(1.0, 0.3, 0.7);
  auto avg = kernel_cell_averages(k, 0.2, 10);
  double acc = 0.0;
  for (double a : avg) acc += a * 0.2;
  CHECK(acc == doctest::Approx(k.integral_from_zero(2.0)).epsilon(1e-12));
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(KernelSpec::power(0.0, 0.2), parameter_error);
  CHECK_THROWS_AS(KernelSpec::power(1.0, -1.0), parameter_error);
  CHECK_THROWS_AS(KernelSpec::trunc_power(1.0, -0.1, 0.7), parameter_error);
  CHECK_THROWS_AS(KernelSpec::trunc_power(1.0, 1.0, 1.2), parameter_error);
  CHECK_THROWS_AS(psi_value(KernelSpec::indicator(), 0.0, 1.0), parameter_error);
  CHECK_THROWS_AS(psi_value(KernelSpec::indicator(), -2.0, 1.0), parameter_error);
}
