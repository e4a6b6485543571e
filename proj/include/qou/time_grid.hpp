#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qou/errors.hpp"

namespace qou {

// Uniform grid {t0 + k*dt : k = 0..count-1}.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t count = 0;

  TimeGrid() = default;
  TimeGrid(double origin, double step, std::size_t n) : t0(origin), dt(step), count(n) {
    if (!(dt > 0.0)) throw grid_error("TimeGrid: step must be positive");
    if (count < 2) throw grid_error("TimeGrid: need at least two points");
  }

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_max() const { return time(count - 1); }
  std::size_t steps() const { return count - 1; }

  std::vector<double> times() const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = time(k);
    return out;
  }

  // Index of the grid point closest to t; throws if t is off-grid.
  std::size_t index_of(double t, double tol = 1e-9) const {
    const double x = (t - t0) / dt;
    const double k = std::round(x);
    if (k < 0 || k >= static_cast<double>(count) || std::abs(x - k) > tol)
      throw grid_error("TimeGrid: time not on grid");
    return static_cast<std::size_t>(k);
  }

  bool contains_time(double t, double tol = 1e-9) const {
    const double x = (t - t0) / dt;
    const double k = std::round(x);
    return k >= 0 && k < static_cast<double>(count) && std::abs(x - k) <= tol;
  }

  bool same_as(const TimeGrid& o, double tol = 1e-12) const {
    return count == o.count && std::abs(t0 - o.t0) <= tol && std::abs(dt - o.dt) <= tol;
  }
};

}  // namespace qou
