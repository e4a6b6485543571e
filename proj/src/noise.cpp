#include "qou/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "qou/fft.hpp"
#include "qou/integrability.hpp"
#include "qou/parallel.hpp"
#include "qou/quadrature.hpp"

namespace qou {

namespace {

// Autocovariance of fBm increments at integer lag k (unit sigma, step dt):
// gamma(k) = dt^{2H}/2 (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}).
double fgn_autocov(double H, double dt, double k) {
  const double p = 2.0 * H;
  return 0.5 * std::pow(dt, p) *
         (std::pow(std::abs(k + 1.0), p) + std::pow(std::abs(k - 1.0), p) -
          2.0 * std::pow(std::abs(k), p));
}

std::vector<double> circulant_eigenvalues(double H, double dt, std::size_t M) {
  const std::size_t L = 2 * M;
  std::vector<std::complex<double>> c(L);
  for (std::size_t j = 0; j <= M; ++j) c[j] = fgn_autocov(H, dt, static_cast<double>(j));
  for (std::size_t j = 1; j < M; ++j) c[L - j] = c[j];
  auto eig = fft_forward(c);
  std::vector<double> out(L);
  for (std::size_t i = 0; i < L; ++i) out[i] = eig[i].real();
  return out;
}

Path anchored_path_from_increments(const TimeGrid& grid, const std::vector<double>& inc) {
  Path p;
  p.grid = grid;
  p.values.assign(grid.count, 0.0);
  for (std::size_t k = 1; k < grid.count; ++k) p.values[k] = p.values[k - 1] + inc[k - 1];
  const std::size_t k0 = grid.index_of(0.0);
  const double base = p.values[k0];
  for (double& v : p.values) v -= base;
  return p;
}

}  // namespace

NoiseSpec NoiseSpec::fbm(double H, double sigma) {
  NoiseSpec s;
  s.kind = Kind::fbm;
  s.H = H;
  s.sigma = sigma;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::pma(KernelSpec kernel, LevyTriplet driver) {
  NoiseSpec s;
  s.kind = Kind::pma;
  s.kernel = std::move(kernel);
  s.driver = std::move(driver);
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::sv(VolatilitySpec vol) {
  NoiseSpec s;
  s.kind = Kind::sv;
  s.vol = vol;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::drift_plus(NoiseSpec base, double mu) {
  NoiseSpec s;
  s.kind = Kind::drift_plus;
  s.base = std::make_shared<NoiseSpec>(std::move(base));
  s.mu = mu;
  s.validate();
  return s;
}

void NoiseSpec::validate() const {
  if (!(past_horizon >= 0.0)) throw parameter_error("NoiseSpec: past_horizon must be >= 0");
  switch (kind) {
    case Kind::fbm:
      if (!(H > 0.0 && H < 1.0)) throw parameter_error("NoiseSpec: fbm H must be in (0,1)");
      if (!(sigma > 0.0)) throw parameter_error("NoiseSpec: fbm sigma must be > 0");
      break;
    case Kind::pma:
      driver.validate();
      if (!pma_admissible_analytic(kernel, driver))
        throw integrability_error("NoiseSpec: kernel not admissible for this driver");
      break;
    case Kind::sv: vol.validate(); break;
    case Kind::drift_plus:
      if (!base) throw parameter_error("NoiseSpec: drift_plus needs a base spec");
      if (base->kind == Kind::drift_plus)
        throw parameter_error("NoiseSpec: nested drift_plus not supported");
      base->validate();
      break;
  }
}

bool NoiseSpec::has_finite_variance() const {
  switch (kind) {
    case Kind::fbm: return true;
    case Kind::pma: return driver.has_finite_variance();
    case Kind::sv: return true;
    case Kind::drift_plus: return base->has_finite_variance();
  }
  return true;
}

std::string NoiseSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::fbm: os << "fbm(H=" << H << ", sigma=" << sigma << ")"; break;
    case Kind::pma: os << "pma(" << kernel.describe() << "; " << driver.describe() << ")"; break;
    case Kind::sv: os << "sv"; break;
    case Kind::drift_plus: os << base->describe() << " + " << mu << "*t"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// fBm
// ---------------------------------------------------------------------------

Path simulate_fbm(double H, double sigma, const TimeGrid& grid, std::uint64_t seed) {
  if (!(H > 0.0 && H < 1.0)) throw parameter_error("simulate_fbm: H must be in (0,1)");
  if (!(sigma > 0.0)) throw parameter_error("simulate_fbm: sigma must be > 0");
  const std::size_t M = grid.steps();

  auto eig = circulant_eigenvalues(H, grid.dt, M);
  double max_eig = 0.0, min_eig = 0.0;
  for (double e : eig) {
    max_eig = std::max(max_eig, e);
    min_eig = std::min(min_eig, e);
  }
  if (min_eig < -1e-10 * max_eig) return simulate_fbm_dense(H, sigma, grid, seed);

  const std::size_t L = 2 * M;
  SplitRng rng = SplitRng(seed).fork(stream::kDriver);
  std::vector<std::complex<double>> v(L);
  auto lam = [&](std::size_t k) { return std::max(0.0, eig[k]); };
  v[0] = std::sqrt(lam(0)) * rng.gauss();
  v[M] = std::sqrt(lam(M)) * rng.gauss();
  for (std::size_t k = 1; k < M; ++k) {
    const double s = std::sqrt(0.5 * lam(k));
    const double re = s * rng.gauss();
    const double im = s * rng.gauss();
    v[k] = {re, im};
    v[L - k] = {re, -im};
  }
  auto x = fft_forward(v);
  const double scale = sigma / std::sqrt(static_cast<double>(L));
  std::vector<double> inc(M);
  for (std::size_t j = 0; j < M; ++j) inc[j] = scale * x[j].real();
  return anchored_path_from_increments(grid, inc);
}

Path simulate_fbm_dense(double H, double sigma, const TimeGrid& grid, std::uint64_t seed) {
  const std::size_t M = grid.steps();
  if (grid.count > kDenseFbmLimit)
    throw numeric_error("simulate_fbm: embedding failed and grid too large for dense fallback (" +
                        std::to_string(grid.count) + " points)");
  // Cholesky of the increment covariance.
  std::vector<double> cov(M * M);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      cov[i * M + j] = fgn_autocov(H, grid.dt, static_cast<double>(i) - static_cast<double>(j));
  std::vector<double> chol(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * M + j];
      for (std::size_t k = 0; k < j; ++k) s -= chol[i * M + k] * chol[j * M + k];
      if (i == j) {
        if (s <= 0.0) {
          s += 1e-12 * fgn_autocov(H, grid.dt, 0.0);
          if (s <= 0.0) throw numeric_error("simulate_fbm: dense factorization lost definiteness");
        }
        chol[i * M + i] = std::sqrt(s);
      } else {
        chol[i * M + j] = s / chol[j * M + j];
      }
    }
  }
  SplitRng rng = SplitRng(seed).fork(stream::kDriver);
  std::vector<double> z(M), inc(M, 0.0);
  for (auto& zi : z) zi = rng.gauss();
  for (std::size_t i = 0; i < M; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += chol[i * M + k] * z[k];
    inc[i] = sigma * s;
  }
  return anchored_path_from_increments(grid, inc);
}

double fbm_embedding_covariance_defect(double H, const TimeGrid& grid, std::size_t max_lag) {
  const std::size_t M = grid.steps();
  auto eig = circulant_eigenvalues(H, grid.dt, M);
  // the generator realizes the covariance IFFT(eigenvalues); compare to gamma
  std::vector<std::complex<double>> in(eig.size());
  for (std::size_t i = 0; i < eig.size(); ++i) in[i] = std::max(0.0, eig[i]);
  auto back = fft_inverse(in);
  double worst = 0.0;
  for (std::size_t k = 0; k <= std::min(max_lag, M - 1); ++k)
    worst = std::max(worst, std::abs(back[k].real() - fgn_autocov(H, grid.dt, k)));
  return worst;
}

// ---------------------------------------------------------------------------
// PMA
// ---------------------------------------------------------------------------

Path pma_path_from_increments(const KernelSpec& kernel, const IncrementSeries& increments,
                              const TimeGrid& out_grid) {
  const TimeGrid& sg = increments.grid;
  if (std::abs(sg.dt - out_grid.dt) > 1e-12 * out_grid.dt)
    throw grid_error("pma_path_from_increments: step mismatch");
  const double off = (out_grid.t0 - sg.t0) / sg.dt;
  const double off_round = std::round(off);
  if (std::abs(off - off_round) > 1e-6 || off_round < 0.0)
    throw grid_error("pma_path_from_increments: grids not aligned");
  const std::size_t offset = static_cast<std::size_t>(off_round);
  if (offset + out_grid.count > sg.count)
    throw grid_error("pma_path_from_increments: increment grid too short");
  if (!out_grid.contains_time(0.0))
    throw grid_error("pma_path_from_increments: output grid must contain time 0");

  const std::size_t K = increments.values.size();
  auto taps = kernel_cell_averages(kernel, sg.dt, K);
  auto conv = convolve(taps, increments.values);  // conv[i] = sum_j taps[i-j] dZ_j

  auto partial = [&](std::size_t s_index) -> double {
    // sum over cells strictly left of grid point s_index
    return s_index == 0 ? 0.0 : conv[s_index - 1];
  };
  const std::size_t zero_index = offset + out_grid.index_of(0.0);
  const double at_zero = partial(zero_index);

  Path out;
  out.grid = out_grid;
  out.values.resize(out_grid.count);
  for (std::size_t k = 0; k < out_grid.count; ++k) {
    const double v = partial(offset + k) - at_zero;
    if (!std::isfinite(v)) throw numeric_error("pma_path_from_increments: non-finite path value");
    out.values[k] = v;
  }
  return out;
}

double pma_tail_mass_ratio(const KernelSpec& kernel, const LevyTriplet& driver,
                           const TimeGrid& grid, double trunc) {
  if (!(trunc > 0.0)) throw parameter_error("pma: truncation horizon must be > 0");
  const double T = grid.t_max();
  const double U0 = trunc - std::min(0.0, grid.t0);

  // compact-difference kernels have no neglected mass once past the support
  const bool compact_diff =
      kernel.kind() == KernelSpec::Kind::indicator ||
      (kernel.kind() == KernelSpec::Kind::tabulated && kernel.table().compact());
  if (compact_diff) {
    const double support_end =
        kernel.kind() == KernelSpec::Kind::indicator ? 0.0 : kernel.table().knots.back();
    return U0 > support_end ? 0.0 : 1.0;
  }

  // tail mass from the derivative asymptote f' ~ C q u^{q-1}
  double q = 0.0, C = 0.0;
  switch (kernel.kind()) {
    case KernelSpec::Kind::power:
      q = kernel.power_beta();
      C = kernel.power_c();
      break;
    case KernelSpec::Kind::trunc_power:
      q = kernel.trunc_H() - 0.5;
      C = kernel.trunc_r0();
      break;
    case KernelSpec::Kind::tabulated:
      q = *kernel.table().tail_exponent;
      C = kernel.table().values.back() / std::pow(kernel.table().knots.back(), q);
      break;
    default: break;
  }
  if (q == 0.0) return 0.0;  // difference decays exponentially-fast (flat tail)

  if (driver.has_finite_variance()) {
    // int_{U0}^inf (T f'(u))^2 du = T^2 C^2 q^2 U0^{2q-1} / (1-2q)
    const double mass = driver.second_moment() * T * T * C * C * q * q *
                        std::pow(U0, 2.0 * q - 1.0) / (1.0 - 2.0 * q);
    const NoiseSpec probe = NoiseSpec::pma(kernel, driver);
    const double vn = variance_function(probe, T);
    return vn > 0.0 ? mass / vn : 0.0;
  }

  // stable driver: compare the alpha-th-power tail mass against the bulk
  const double alpha = driver.stable_alpha;
  const double tail_pow = alpha * (q - 1.0);
  if (!(tail_pow < -1.0)) return 1.0;
  const double mass = std::pow(T * std::abs(C * q), alpha) * std::pow(U0, tail_pow + 1.0) /
                      (-tail_pow - 1.0);
  auto bulk_f = [&](double u) { return std::pow(std::abs(kernel.value(u)) + 1e-300, alpha); };
  QuadOptions opts;
  opts.abs_tol = 1e-9;
  opts.rel_tol = 1e-7;
  const double p = kernel.origin_exponent() * alpha;
  double bulk;
  if (p < 0.0)
    bulk = integrate_power_left([&](double u) { return bulk_f(u) * std::pow(u, -p); }, p, 0.0, T,
                                opts)
               .value;
  else
    bulk = integrate(bulk_f, 0.0, T, opts).value;
  return bulk > 0.0 ? mass / bulk : 0.0;
}

double suggest_pma_truncation(const KernelSpec& kernel, const LevyTriplet& driver,
                              const TimeGrid& grid, double tol) {
  double lo = grid.t_max() - grid.t0 + grid.dt;
  if (pma_tail_mass_ratio(kernel, driver, grid, lo) <= tol) return lo;
  double hi = lo;
  for (int i = 0; i < 200 && pma_tail_mass_ratio(kernel, driver, grid, hi) > tol; ++i) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pma_tail_mass_ratio(kernel, driver, grid, mid) > tol)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

Path simulate_pma(const KernelSpec& kernel, const LevyTriplet& driver, const TimeGrid& grid,
                  double trunc, std::uint64_t seed, double tail_tolerance) {
  if (!pma_admissible_analytic(kernel, driver))
    throw integrability_error("simulate_pma: kernel not admissible for this driver: " +
                              kernel.describe());
  const double ratio = pma_tail_mass_ratio(kernel, driver, grid, trunc);
  if (ratio > tail_tolerance) {
    std::ostringstream os;
    os << "simulate_pma: truncation horizon " << trunc << " leaves relative tail mass " << ratio
       << " > " << tail_tolerance << "; suggested horizon "
       << suggest_pma_truncation(kernel, driver, grid, tail_tolerance);
    throw truncation_error(os.str());
  }
  const std::size_t past = static_cast<std::size_t>(std::ceil(trunc / grid.dt));
  const TimeGrid sgrid(grid.t0 - static_cast<double>(past) * grid.dt, grid.dt, grid.count + past);
  auto inc = sample_levy_increments(driver, sgrid, seed);
  return pma_path_from_increments(kernel, inc, grid);
}

// ---------------------------------------------------------------------------
// Variance function
// ---------------------------------------------------------------------------

namespace {

// int_0^x f(u)^2 du with the origin singularity absorbed.
double kernel_square_integral(const KernelSpec& kernel, double x) {
  if (x <= 0.0) return 0.0;
  QuadOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-10;
  opts.max_panels = 8000;
  std::vector<double> brk;
  if (kernel.kind() == KernelSpec::Kind::trunc_power) brk.push_back(kernel.trunc_delta());
  if (kernel.kind() == KernelSpec::Kind::tabulated)
    brk.assign(kernel.table().knots.begin(), kernel.table().knots.end());
  if (const auto* b = kernel.bump()) brk.insert(brk.end(), b->knots.begin(), b->knots.end());

  const double p = 2.0 * kernel.origin_exponent();
  if (p < 0.0) {
    // pull out the u^{2 beta} singularity; the remaining factor is bounded
    auto g = [&](double u) {
      const double f = kernel.value(u);
      return f * f * std::pow(u, -p);
    };
    // split at the first structural break to keep the transform local
    double first = x;
    for (double b : brk)
      if (b > 0.0) first = std::min(first, b);
    double acc = integrate_power_left(g, p, 0.0, std::min(first, x), opts).value;
    if (x > first)
      acc += integrate([&](double u) { const double f = kernel.value(u); return f * f; }, first, x,
                       opts, brk)
                 .value;
    return acc;
  }
  auto f2 = [&](double u) {
    const double f = kernel.value(u);
    return f * f;
  };
  return integrate(f2, 0.0, x, opts, brk).value;
}

// int_0^inf (f(u+T) - f(u))^2 du.
double kernel_difference_square_integral(const KernelSpec& kernel, double T) {
  QuadOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-10;
  opts.max_panels = 8000;

  auto diff = [&](double u) { return kernel.value(u + T) - kernel.value(u); };
  auto diff2 = [&](double u) {
    const double d = diff(u);
    return d * d;
  };

  // structural breakpoints in u from kinks of f at {delta, knots} shifted by T
  std::vector<double> marks;
  auto add = [&](double m) {
    if (m > 0.0) marks.push_back(m);
  };
  if (kernel.kind() == KernelSpec::Kind::trunc_power) {
    add(kernel.trunc_delta());
    add(kernel.trunc_delta() - T);
  }
  if (kernel.kind() == KernelSpec::Kind::tabulated)
    for (double k : kernel.table().knots) {
      add(k);
      add(k - T);
    }
  if (const auto* b = kernel.bump())
    for (double k : b->knots) {
      add(k);
      add(k - T);
    }

  // compact-difference kernels: indicator (difference vanishes) and compact
  // tables (difference supported in [0, last knot])
  if (kernel.kind() == KernelSpec::Kind::indicator && !kernel.has_bump()) return 0.0;
  const bool compact =
      (kernel.kind() == KernelSpec::Kind::indicator ||
       (kernel.kind() == KernelSpec::Kind::tabulated && kernel.table().compact()));
  double upper_support = std::numeric_limits<double>::infinity();
  if (compact) {
    upper_support = kernel.kind() == KernelSpec::Kind::indicator ? 0.0 : kernel.table().knots.back();
    if (const auto* b = kernel.bump()) upper_support = std::max(upper_support, b->knots.back());
  }

  double acc = 0.0;
  const double p = 2.0 * kernel.origin_exponent();
  const double head = std::min({T, upper_support, 1e300});
  if (p < 0.0 && head > 0.0) {
    auto g = [&](double u) {
      const double d = diff(u);
      return d * d * std::pow(u, -p);
    };
    double first = head;
    for (double m : marks) first = std::min(first, m);
    acc += integrate_power_left(g, p, 0.0, first, opts).value;
    if (head > first) acc += integrate(diff2, first, head, opts, marks).value;
  } else if (head > 0.0) {
    acc += integrate(diff2, 0.0, head, opts, marks).value;
  }

  if (compact) {
    if (upper_support > head) acc += integrate(diff2, head, upper_support, opts, marks).value;
    return acc;
  }

  // power-type tail: integrate numerically to a cut, then use the
  // derivative asymptote (f(u+T)-f(u)) ~ T f'(u) beyond it
  double q = kernel.kind() == KernelSpec::Kind::power ? kernel.power_beta()
                                                      : (kernel.kind() == KernelSpec::Kind::trunc_power
                                                             ? kernel.trunc_H() - 0.5
                                                             : *kernel.table().tail_exponent);
  double cut = std::max({8.0 * T, 50.0, head});
  for (double m : marks) cut = std::max(cut, 2.0 * m);
  acc += integrate(diff2, head, cut, opts, marks).value;
  if (q != 0.0) {
    const double decay = 2.0 * (q - 1.0);
    auto tail_g = [&](double u) {
      const double d = diff(u);
      return d * d * std::pow(u, -decay);
    };
    acc += integrate_tail_power(tail_g, decay, cut, opts).value;
  }
  return acc;
}

}  // namespace

double variance_function(const NoiseSpec& spec, double t) {
  spec.validate();
  const double T = std::abs(t);
  switch (spec.kind) {
    case NoiseSpec::Kind::fbm: return spec.sigma * spec.sigma * std::pow(T, 2.0 * spec.H);
    case NoiseSpec::Kind::sv: return spec.vol.mean_square * T;
    case NoiseSpec::Kind::drift_plus: return variance_function(*spec.base, t);
    case NoiseSpec::Kind::pma: {
      if (!spec.driver.has_finite_variance())
        throw unsupported_moment_error("variance_function: infinite-variance driver");
      if (T == 0.0) return 0.0;
      const double var1 = spec.driver.second_moment();
      return var1 * (kernel_square_integral(spec.kernel, T) +
                     kernel_difference_square_integral(spec.kernel, T));
    }
  }
  return 0.0;
}

Path simulate_noise(const NoiseSpec& spec, const TimeGrid& grid, std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case NoiseSpec::Kind::fbm: return simulate_fbm(spec.H, spec.sigma, grid, seed);
    case NoiseSpec::Kind::sv: {
      auto inc = sample_sv_increments(spec.vol, grid, seed);
      return anchored_path_from_increments(grid, inc.values);
    }
    case NoiseSpec::Kind::pma: {
      const double trunc =
          suggest_pma_truncation(spec.kernel, spec.driver, grid, spec.pma_tail_tolerance);
      return simulate_pma(spec.kernel, spec.driver, grid, trunc, seed, spec.pma_tail_tolerance);
    }
    case NoiseSpec::Kind::drift_plus: {
      Path p = simulate_noise(*spec.base, grid, seed);
      const double t0 = p.grid.t0;
      for (std::size_t k = 0; k < p.values.size(); ++k)
        p.values[k] += spec.mu * (t0 + static_cast<double>(k) * p.grid.dt);
      return p;
    }
  }
  throw parameter_error("simulate_noise: unknown kind");
}

PathEnsemble sample_noise_ensemble(const NoiseSpec& spec, const TimeGrid& grid, std::size_t m,
                                   std::uint64_t master_seed, unsigned threads) {
  PathEnsemble ens;
  ens.grid = grid;
  ens.master_seed = master_seed;
  ens.provenance = spec.describe();
  ens.paths.resize(m);
  parallel_for(m, threads, [&](std::size_t p) {
    ens.paths[p] = simulate_noise(spec, grid, derive_seed(master_seed, p)).values;
  });
  return ens;
}

}  // namespace qou
