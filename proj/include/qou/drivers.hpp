#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qou/errors.hpp"
#include "qou/rng.hpp"
#include "qou/time_grid.hpp"

namespace qou {

// Jump law of a compound-Poisson component. Need not be centered; the
// sampled increments subtract the compensator rate*dt*mean().
struct JumpLaw {
  enum class Kind { gaussian, uniform, dirac };
  Kind kind = Kind::gaussian;
  double a = 0.0;  // gaussian: mean, uniform: lower, dirac: value
  double b = 1.0;  // gaussian: sd,   uniform: upper, dirac: unused

  double mean() const;
  double second_moment() const;
  double sample(SplitRng& rng) const;
};

// Centered square-integrable (or symmetric alpha-stable) driving law:
// Gaussian variance per unit time plus an optional jump component.
struct LevyTriplet {
  enum class JumpKind { none, stable, compound_poisson };

  double gaussian_var = 0.0;
  JumpKind jump_kind = JumpKind::none;
  double stable_alpha = 0.0;  // in (0,2]
  double stable_scale = 0.0;
  double cp_rate = 0.0;
  JumpLaw cp_jumps;

  static LevyTriplet gaussian(double var_per_unit_time);
  static LevyTriplet stable(double alpha, double scale);
  static LevyTriplet compound_poisson(double rate, JumpLaw jumps, double gaussian_var = 0.0);

  void validate() const;

  // Variance of Z_1; +infinity for stable alpha < 2.
  double second_moment() const;
  bool has_finite_variance() const { return second_moment() < std::numeric_limits<double>::infinity(); }
  bool is_stable() const { return jump_kind == JumpKind::stable; }

  std::string describe() const;
};

struct IncrementSeries {
  TimeGrid grid;
  std::vector<double> values;  // length grid.count - 1, cell k = [t_k, t_{k+1})
  std::uint64_t seed = 0;
  LevyTriplet driver;
};

// i.i.d. increments with the law of Z_dt on each grid cell. Same
// (triplet, grid, seed) gives bit-identical values.
IncrementSeries sample_levy_increments(const LevyTriplet& triplet, const TimeGrid& grid,
                                       std::uint64_t seed);

// Sum consecutive groups of `factor` cells; exact coarse-grid increments of
// the same underlying path (used by grid-refinement experiments).
IncrementSeries aggregate_increments(const IncrementSeries& fine, std::size_t factor);

// Stationary positive volatility process: constant, or the exponential of a
// Gaussian Ornstein-Uhlenbeck process started from its stationary law and
// normalized to a prescribed E[sigma_0^2].
struct VolatilitySpec {
  enum class Kind { constant, exp_ou };
  Kind kind = Kind::constant;
  double mean_square = 1.0;  // E[sigma_0^2]
  double kappa = 1.0;        // exp_ou mean reversion
  double v = 0.0;            // exp_ou stationary variance of the log field

  static VolatilitySpec constant(double mean_square);
  static VolatilitySpec exp_ou(double kappa, double v, double mean_square);

  void validate() const;
};

// Increments of N_t = int_0^t sigma_s dB_s on the grid:
// sigma_{t_k} * (B_{t_{k+1}} - B_{t_k}), with sigma and B on independent
// substreams of the same seed.
IncrementSeries sample_sv_increments(const VolatilitySpec& vol, const TimeGrid& grid,
                                     std::uint64_t seed);

}  // namespace qou
