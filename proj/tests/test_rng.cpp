#include <cmath>
#include <vector>

#include "doctest.h"
#include "qou/rng.hpp"

using qou::SplitRng;

TEST_CASE("same seed gives bit-identical streams") {
  SplitRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forked substreams are decorrelated and order-independent") {
  SplitRng root(7);
  SplitRng s1 = root.fork(1);
  SplitRng s2 = root.fork(2);
  // forking must not consume from the parent
  SplitRng root2(7);
  CHECK(root.next_u64() == root2.next_u64());

  double corr = 0.0, m1 = 0.0, m2 = 0.0, v1 = 0.0, v2 = 0.0;
  const int n = 20000;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = s1.uniform01();
    y[i] = s2.uniform01();
    m1 += x[i];
    m2 += y[i];
  }
  m1 /= n;
  m2 /= n;
  for (int i = 0; i < n; ++i) {
    corr += (x[i] - m1) * (y[i] - m2);
    v1 += (x[i] - m1) * (x[i] - m1);
    v2 += (y[i] - m2) * (y[i] - m2);
  }
  corr /= std::sqrt(v1 * v2);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("gauss moments") {
  SplitRng rng(123);
  const int n = 200000;
  double m = 0, v = 0, k4 = 0;
  std::vector<double> z(n);
  for (auto& zi : z) zi = rng.gauss();
  for (double zi : z) m += zi;
  m /= n;
  for (double zi : z) {
    v += (zi - m) * (zi - m);
    k4 += std::pow(zi - m, 4);
  }
  v /= (n - 1);
  k4 /= n;
  CHECK(std::abs(m) < 4.0 / std::sqrt(double(n)));
  CHECK(v == doctest::Approx(1.0).epsilon(0.02));
  CHECK(k4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("poisson mean and variance, including the split regime") {
  SplitRng rng(9);
  for (double mean : {0.05, 3.0, 250.0}) {
    const int n = 40000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    const double v = s2 / n - m * m;
    const double se = std::sqrt(mean / n);
    CHECK(std::abs(m - mean) < 5 * se);
    CHECK(v == doctest::Approx(mean).epsilon(0.08));
  }
}

TEST_CASE("stable alpha=2 reduces to a Gaussian of variance 2") {
  SplitRng rng(5);
  const int n = 100000;
  double v = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.stable_symmetric(2.0);
    v += x * x;
  }
  v /= n;
  CHECK(v == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("stable draws are symmetric") {
  SplitRng rng(17);
  const int n = 100000;
  int pos = 0;
  for (int i = 0; i < n; ++i)
    if (rng.stable_symmetric(1.5) > 0) ++pos;
  CHECK(std::abs(pos - n / 2) < 4 * std::sqrt(n / 4.0));
}
