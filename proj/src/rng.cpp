#include "qou/rng.hpp"

#include <cmath>

#include "qou/errors.hpp"

namespace qou {

double SplitRng::gauss() noexcept {
  if (has_cached_gauss_) {
    has_cached_gauss_ = false;
    return cached_gauss_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_gauss_ = r * std::sin(a);
  has_cached_gauss_ = true;
  return r * std::cos(a);
}

double SplitRng::exponential() noexcept { return -std::log(uniform01()); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master ^ mix(id + 0x2545f4914f6cdd1dULL));
}

std::uint64_t SplitRng::poisson(double mean) {
  if (!(mean >= 0.0)) throw parameter_error("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean > 1e9) throw parameter_error("poisson: mean too large for exact sampling");
  // Split large means; each half is again Poisson.
  if (mean > 32.0) {
    const double half = 0.5 * mean;
    return poisson(half) + poisson(half);
  }
  // Knuth multiplication in the small-mean regime.
  const double limit = std::exp(-mean);
  std::uint64_t n = 0;
  double prod = uniform01();
  while (prod > limit) {
    ++n;
    prod *= uniform01();
  }
  return n;
}

double SplitRng::stable_symmetric(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw parameter_error("stable_symmetric: alpha must be in (0,2]");
  const double u = M_PI * (uniform01() - 0.5);  // uniform on (-pi/2, pi/2)
  if (alpha == 1.0) return std::tan(u);
  const double w = exponential();
  const double a = alpha * u;
  const double x = std::sin(a) / std::pow(std::cos(u), 1.0 / alpha);
  const double y = std::pow(std::cos(u - a) / w, (1.0 - alpha) / alpha);
  return x * y;
}

}  // namespace qou
