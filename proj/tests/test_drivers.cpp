#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qou/drivers.hpp"

using namespace qou;

namespace {
double sample_mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}
double sample_var(const std::vector<double>& x) {
  const double m = sample_mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}
double lag1_autocorr(const std::vector<double>& x) {
  const double m = sample_mean(x);
  double num = 0, den = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) num += (x[i] - m) * (x[i + 1] - m);
  for (double v : x) den += (v - m) * (v - m);
  return num / den;
}
}  // namespace

TEST_CASE("brownian increments have the right variance") {
  const TimeGrid grid(0.0, 0.01, 100001);
  auto inc = sample_levy_increments(LevyTriplet::gaussian(1.0), grid, 1234);
  REQUIRE(inc.values.size() == 100000);
  const double v = sample_var(inc.values);
  const double tol = 0.01 * 4.0 / std::sqrt(100000.0 - 1.0);
  CHECK(std::abs(v - 0.01) < tol);
  CHECK(std::abs(sample_mean(inc.values)) < 5.0 * std::sqrt(0.01 / 100000.0));
  CHECK(std::abs(lag1_autocorr(inc.values)) < 4.0 / std::sqrt(100000.0));
}

TEST_CASE("all-zero activity is rejected at construction") {
  LevyTriplet t;
  t.gaussian_var = 0.0;
  CHECK_THROWS_AS(t.validate(), parameter_error);
  CHECK_THROWS_AS(LevyTriplet::gaussian(0.0), parameter_error);
}

TEST_CASE("invalid stable alpha rejected") {
  CHECK_THROWS_AS(LevyTriplet::stable(2.5, 1.0), parameter_error);
  CHECK_THROWS_AS(LevyTriplet::stable(0.0, 1.0), parameter_error);
  CHECK_THROWS_AS(sample_levy_increments(LevyTriplet::gaussian(1.0), TimeGrid(0.0, 0.0, 10), 1),
                  grid_error);
}

TEST_CASE("stable 1.5 increments: symmetric with Hill tail index near 1.5") {
  // Hill estimator on the top k order statistics of |X| is the stated
  // independent oracle for the tail index.
  const std::size_t n = 1000001;
  const TimeGrid grid(0.0, 1.0, n);
  auto inc = sample_levy_increments(LevyTriplet::stable(1.5, 1.0), grid, 99);
  std::vector<double> a(inc.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(inc.values[i]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  const std::size_t k = 10000;
  double g = 0;
  for (std::size_t i = 0; i < k; ++i) g += std::log(a[i] / a[k]);
  const double alpha_hat = static_cast<double>(k) / g;
  CHECK(std::abs(alpha_hat - 1.5) < 0.1);

  std::vector<double> sorted = inc.values;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  // median of n symmetric draws: SE ~ 1/(2 f(0) sqrt(n)); just assert small
  CHECK(std::abs(median) < 0.01);
}

TEST_CASE("compound poisson centering is exact in expectation") {
  const TimeGrid grid(0.0, 0.05, 40001);
  JumpLaw jumps;
  jumps.kind = JumpLaw::Kind::uniform;
  jumps.a = 0.0;
  jumps.b = 2.0;  // mean 1, second moment 4/3
  auto triplet = LevyTriplet::compound_poisson(3.0, jumps);
  auto inc = sample_levy_increments(triplet, grid, 7);
  const double var_per_cell = 3.0 * jumps.second_moment() * grid.dt;
  CHECK(std::abs(sample_mean(inc.values)) < 5.0 * std::sqrt(var_per_cell / 40000.0));
  CHECK(sample_var(inc.values) == doctest::Approx(var_per_cell).epsilon(0.05));
  CHECK(triplet.second_moment() == doctest::Approx(3.0 * 4.0 / 3.0));
}

TEST_CASE("determinism: same spec, grid, seed") {
  const TimeGrid grid(0.0, 0.01, 1000);
  auto a = sample_levy_increments(LevyTriplet::stable(1.2, 0.7), grid, 31);
  auto b = sample_levy_increments(LevyTriplet::stable(1.2, 0.7), grid, 31);
  CHECK(a.values == b.values);
  auto c = sample_levy_increments(LevyTriplet::stable(1.2, 0.7), grid, 32);
  CHECK(a.values != c.values);
}

TEST_CASE("aggregation reproduces coarse increments exactly") {
  const TimeGrid grid(0.0, 0.25, 17);
  auto fine = sample_levy_increments(LevyTriplet::gaussian(2.0), grid, 5);
  auto coarse = aggregate_increments(fine, 4);
  REQUIRE(coarse.values.size() == 4);
  CHECK(coarse.grid.dt == doctest::Approx(1.0));
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0;
    for (std::size_t j = 0; j < 4; ++j) s += fine.values[4 * k + j];
    CHECK(coarse.values[k] == s);
  }
}

TEST_CASE("constant volatility reduces to brownian increments") {
  const TimeGrid grid(0.0, 0.01, 2001);
  auto a = sample_sv_increments(VolatilitySpec::constant(1.0), grid, 11);
  auto b = sample_sv_increments(VolatilitySpec::constant(1.0), grid, 11);
  CHECK(a.values == b.values);  // bit-identical
  const double v = sample_var(a.values);
  CHECK(v == doctest::Approx(0.01).epsilon(0.15));
}

TEST_CASE("exp-OU volatility converges to constant vol as v -> 0") {
  const TimeGrid grid(0.0, 0.01, 101);
  auto base = sample_sv_increments(VolatilitySpec::constant(1.0), grid, 21);
  auto tiny = sample_sv_increments(VolatilitySpec::exp_ou(1.0, 1e-12, 1.0), grid, 21);
  double maxdiff = 0;
  for (std::size_t i = 0; i < base.values.size(); ++i)
    maxdiff = std::max(maxdiff, std::abs(base.values[i] - tiny.values[i]));
  CHECK(maxdiff < 1e-6);
}

TEST_CASE("exp-OU volatility: Ito isometry E[N_1^2] = E[sigma_0^2]") {
  const std::size_t m = 10000;
  const TimeGrid grid(0.0, 0.05, 21);  // N_1 from 20 cells
  std::vector<double> n1(m);
  for (std::size_t p = 0; p < m; ++p) {
    auto inc = sample_sv_increments(VolatilitySpec::exp_ou(1.0, 0.25, 1.0),
                                    grid, 1000 + p);
    double s = 0;
    for (double z : inc.values) s += z;
    n1[p] = s;
  }
  const double v = sample_var(n1);
  // E[N_1^2] = E[sigma_0^2] = 1; 4 SE band with SE ~ sqrt((kurt-1)/m) * v,
  // lognormal sigma^2 inflates the variance of the variance: use 4*sqrt(3/m)
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(3.0 / static_cast<double>(m)));
}

TEST_CASE("nonstationary volatility spec rejected") {
  CHECK_THROWS_AS(VolatilitySpec::exp_ou(0.0, 0.25, 1.0), parameter_error);
  CHECK_THROWS_AS(VolatilitySpec::exp_ou(1.0, -0.1, 1.0), parameter_error);
}
