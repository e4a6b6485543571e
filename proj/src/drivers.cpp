#include "qou/drivers.hpp"

#include <cmath>
#include <sstream>

namespace qou {

double JumpLaw::mean() const {
  switch (kind) {
    case Kind::gaussian: return a;
    case Kind::uniform: return 0.5 * (a + b);
    case Kind::dirac: return a;
  }
  return 0.0;
}

double JumpLaw::second_moment() const {
  switch (kind) {
    case Kind::gaussian: return a * a + b * b;
    case Kind::uniform: return (a * a + a * b + b * b) / 3.0;
    case Kind::dirac: return a * a;
  }
  return 0.0;
}

double JumpLaw::sample(SplitRng& rng) const {
  switch (kind) {
    case Kind::gaussian: return a + b * rng.gauss();
    case Kind::uniform: return a + (b - a) * rng.uniform01();
    case Kind::dirac: return a;
  }
  return 0.0;
}

LevyTriplet LevyTriplet::gaussian(double var_per_unit_time) {
  LevyTriplet t;
  t.gaussian_var = var_per_unit_time;
  t.validate();
  return t;
}

LevyTriplet LevyTriplet::stable(double alpha, double scale) {
  LevyTriplet t;
  t.jump_kind = JumpKind::stable;
  t.stable_alpha = alpha;
  t.stable_scale = scale;
  t.validate();
  return t;
}

LevyTriplet LevyTriplet::compound_poisson(double rate, JumpLaw jumps, double gaussian_var) {
  LevyTriplet t;
  t.jump_kind = JumpKind::compound_poisson;
  t.cp_rate = rate;
  t.cp_jumps = jumps;
  t.gaussian_var = gaussian_var;
  t.validate();
  return t;
}

void LevyTriplet::validate() const {
  if (!(gaussian_var >= 0.0)) throw parameter_error("LevyTriplet: gaussian_var must be >= 0");
  switch (jump_kind) {
    case JumpKind::none:
      if (gaussian_var == 0.0) throw parameter_error("LevyTriplet: driver has no activity");
      break;
    case JumpKind::stable:
      if (!(stable_alpha > 0.0 && stable_alpha <= 2.0))
        throw parameter_error("LevyTriplet: stable alpha must be in (0,2]");
      if (!(stable_scale > 0.0)) throw parameter_error("LevyTriplet: stable scale must be > 0");
      break;
    case JumpKind::compound_poisson:
      if (!(cp_rate > 0.0)) throw parameter_error("LevyTriplet: compound-Poisson rate must be > 0");
      if (jump_kind == JumpKind::compound_poisson && cp_jumps.kind == JumpLaw::Kind::uniform &&
          !(cp_jumps.b > cp_jumps.a))
        throw parameter_error("LevyTriplet: uniform jump law needs a < b");
      break;
  }
}

double LevyTriplet::second_moment() const {
  double m2 = gaussian_var;
  switch (jump_kind) {
    case JumpKind::none: break;
    case JumpKind::stable:
      if (stable_alpha < 2.0) return std::numeric_limits<double>::infinity();
      m2 += 2.0 * stable_scale * stable_scale;  // alpha = 2: Gaussian, var 2*scale^2
      break;
    case JumpKind::compound_poisson:
      m2 += cp_rate * cp_jumps.second_moment();
      break;
  }
  return m2;
}

std::string LevyTriplet::describe() const {
  std::ostringstream os;
  os << "gaussian_var=" << gaussian_var;
  if (jump_kind == JumpKind::stable)
    os << " stable(alpha=" << stable_alpha << ", scale=" << stable_scale << ")";
  if (jump_kind == JumpKind::compound_poisson)
    os << " compound_poisson(rate=" << cp_rate << ")";
  return os.str();
}

IncrementSeries sample_levy_increments(const LevyTriplet& triplet, const TimeGrid& grid,
                                       std::uint64_t seed) {
  triplet.validate();
  if (!(grid.dt > 0.0)) throw grid_error("sample_levy_increments: nonpositive step");

  IncrementSeries out;
  out.grid = grid;
  out.seed = seed;
  out.driver = triplet;
  out.values.assign(grid.steps(), 0.0);

  SplitRng rng = SplitRng(seed).fork(stream::kDriver);
  const double dt = grid.dt;
  const double g_sd = std::sqrt(triplet.gaussian_var * dt);
  const double stable_sd = triplet.is_stable() ? triplet.stable_scale * std::pow(dt, 1.0 / triplet.stable_alpha) : 0.0;
  const double cp_mean = triplet.cp_rate * dt;
  const double compensator = cp_mean * triplet.cp_jumps.mean();

  for (double& z : out.values) {
    double v = 0.0;
    if (g_sd > 0.0) v += g_sd * rng.gauss();
    switch (triplet.jump_kind) {
      case LevyTriplet::JumpKind::none: break;
      case LevyTriplet::JumpKind::stable:
        v += stable_sd * rng.stable_symmetric(triplet.stable_alpha);
        break;
      case LevyTriplet::JumpKind::compound_poisson: {
        const std::uint64_t n = rng.poisson(cp_mean);
        for (std::uint64_t i = 0; i < n; ++i) v += triplet.cp_jumps.sample(rng);
        v -= compensator;
        break;
      }
    }
    z = v;
  }
  return out;
}

IncrementSeries aggregate_increments(const IncrementSeries& fine, std::size_t factor) {
  if (factor == 0 || fine.values.size() % factor != 0)
    throw grid_error("aggregate_increments: cell count not divisible by factor");
  IncrementSeries out;
  out.grid = TimeGrid(fine.grid.t0, fine.grid.dt * static_cast<double>(factor),
                      fine.values.size() / factor + 1);
  out.seed = fine.seed;
  out.driver = fine.driver;
  out.values.resize(fine.values.size() / factor);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < factor; ++j) s += fine.values[k * factor + j];
    out.values[k] = s;
  }
  return out;
}

VolatilitySpec VolatilitySpec::constant(double mean_square) {
  VolatilitySpec v;
  v.kind = Kind::constant;
  v.mean_square = mean_square;
  v.validate();
  return v;
}

VolatilitySpec VolatilitySpec::exp_ou(double kappa, double var, double mean_square) {
  VolatilitySpec v;
  v.kind = Kind::exp_ou;
  v.kappa = kappa;
  v.v = var;
  v.mean_square = mean_square;
  v.validate();
  return v;
}

void VolatilitySpec::validate() const {
  if (!(mean_square > 0.0)) throw parameter_error("VolatilitySpec: E[sigma^2] must be > 0");
  if (kind == Kind::exp_ou) {
    if (!(kappa > 0.0)) throw parameter_error("VolatilitySpec: kappa must be > 0 for a stationary spec");
    if (!(v >= 0.0)) throw parameter_error("VolatilitySpec: log-field variance must be >= 0");
  }
}

IncrementSeries sample_sv_increments(const VolatilitySpec& vol, const TimeGrid& grid,
                                     std::uint64_t seed) {
  vol.validate();
  IncrementSeries out;
  out.grid = grid;
  out.seed = seed;
  out.driver = LevyTriplet::gaussian(vol.mean_square);
  out.values.assign(grid.steps(), 0.0);

  SplitRng root(seed);
  SplitRng vol_rng = root.fork(stream::kVolatility);
  SplitRng b_rng = root.fork(stream::kBrownian);
  const double sqdt = std::sqrt(grid.dt);

  if (vol.kind == VolatilitySpec::Kind::constant) {
    const double s = std::sqrt(vol.mean_square);
    for (double& z : out.values) z = s * sqdt * b_rng.gauss();
    return out;
  }

  // Exact AR(1) recursion for the stationary log field Y, then
  // sigma = sqrt(mean_square) * exp(Y - v) so that E[sigma^2] = mean_square.
  const double phi = std::exp(-vol.kappa * grid.dt);
  const double innov_sd = std::sqrt(vol.v * (1.0 - phi * phi));
  const double amp = std::sqrt(vol.mean_square) * std::exp(-vol.v);
  double y = std::sqrt(vol.v) * vol_rng.gauss();  // stationary initial draw
  for (double& z : out.values) {
    const double sigma = amp * std::exp(y);
    z = sigma * sqdt * b_rng.gauss();
    y = phi * y + innov_sd * vol_rng.gauss();
  }
  return out;
}

}  // namespace qou
