#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "qou/drivers.hpp"
#include "qou/kernels.hpp"
#include "qou/paths.hpp"
#include "qou/time_grid.hpp"

namespace qou {

// Stationary-increment noise process N with N_0 = 0:
//   fbm         fractional Brownian motion of index H, scale sigma
//   pma         int (f(t-s) - f(-s)) dZ_s for a kernel f and Levy driver Z
//   sv          int_0^t sigma_s dB_s with stationary volatility
//   drift_plus  base noise plus mu * t
struct NoiseSpec {
  enum class Kind { fbm, pma, sv, drift_plus };
  Kind kind = Kind::fbm;

  double H = 0.5;
  double sigma = 1.0;

  KernelSpec kernel = KernelSpec::indicator();
  LevyTriplet driver = LevyTriplet::gaussian(1.0);
  double pma_tail_tolerance = 1e-3;  // neglected tail mass relative to V_N(t_max)

  VolatilitySpec vol = VolatilitySpec::constant(1.0);

  std::shared_ptr<NoiseSpec> base;  // drift_plus
  double mu = 0.0;

  double past_horizon = 0.0;  // negative-time window materialized by default

  static NoiseSpec fbm(double H, double sigma);
  static NoiseSpec pma(KernelSpec kernel, LevyTriplet driver);
  static NoiseSpec sv(VolatilitySpec vol);
  static NoiseSpec drift_plus(NoiseSpec base, double mu);

  void validate() const;
  double drift() const { return kind == Kind::drift_plus ? mu : 0.0; }
  bool has_finite_variance() const;
  std::string describe() const;
};

// Exact fractional Brownian motion on the grid (grid must contain time 0;
// the path is anchored N(0) = 0). Circulant embedding of the increment
// covariance; dense factorization fallback when the embedding fails.
Path simulate_fbm(double H, double sigma, const TimeGrid& grid, std::uint64_t seed);

// Dense-covariance fallback, exposed for direct testing. Grids above
// kDenseFbmLimit points are refused.
inline constexpr std::size_t kDenseFbmLimit = 4097;
Path simulate_fbm_dense(double H, double sigma, const TimeGrid& grid, std::uint64_t seed);

// Diagnostic for the embedding: the covariance the circulant generator
// realizes at lags 0..max_lag minus the analytic increment covariance.
double fbm_embedding_covariance_defect(double H, const TimeGrid& grid, std::size_t max_lag);

// Discretized PMA built from given driver increments. The increment grid
// must extend past out_grid.t0 (the truncation window) and cover its end;
// out_grid must contain time 0 and share the step. Kernel weights are exact
// cell averages, so the indicator kernel telescopes to Z exactly and
// N(0) = 0 holds to the last bit.
Path pma_path_from_increments(const KernelSpec& kernel, const IncrementSeries& increments,
                              const TimeGrid& out_grid);

// Sample the driver, then build the PMA with truncation horizon `trunc`
// beyond the left end of the grid. Tail-mass validation per
// `tail_tolerance` relative to V_N(t_max); suggestions on failure.
Path simulate_pma(const KernelSpec& kernel, const LevyTriplet& driver, const TimeGrid& grid,
                  double trunc, std::uint64_t seed, double tail_tolerance = 1e-6);

// Truncation horizon whose neglected tail mass is below tol * V_N(t_max).
double suggest_pma_truncation(const KernelSpec& kernel, const LevyTriplet& driver,
                              const TimeGrid& grid, double tol);

// Relative neglected tail mass for a given horizon.
double pma_tail_mass_ratio(const KernelSpec& kernel, const LevyTriplet& driver,
                           const TimeGrid& grid, double trunc);

// V_N(t) = Var(N_t). Closed form for fbm/sv, quadrature for pma.
double variance_function(const NoiseSpec& spec, double t);

// Dispatch on the spec; grid must contain 0.
Path simulate_noise(const NoiseSpec& spec, const TimeGrid& grid, std::uint64_t seed);

// m independent seeded paths; deterministic in (spec, grid, seed) and
// independent of the worker count.
PathEnsemble sample_noise_ensemble(const NoiseSpec& spec, const TimeGrid& grid, std::size_t m,
                                   std::uint64_t master_seed, unsigned threads = 0);

}  // namespace qou
