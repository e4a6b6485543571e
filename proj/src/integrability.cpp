#include "qou/integrability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qou/parallel.hpp"
#include "qou/quadrature.hpp"

namespace qou {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// integrand of the jump part at a single jump size u
double jump_phi_term(double u, double y) {
  const double v = std::abs(u * y);
  return v <= 1.0 ? v * v : 2.0 * v - 1.0;
}

// int_R [ (v)^2 1 + (2|v|-1) 1 ] |v|^{-1-alpha} dv, alpha in (1,2)
double stable_phi_shape(double alpha) {
  return 2.0 * (1.0 / (2.0 - alpha) + 2.0 / (alpha - 1.0) - 1.0 / alpha);
}

// one-sided Levy density constant C so that nu(du) = C |u|^{-1-alpha} du
// matches the scale convention E e^{iyZ_1} = e^{-(scale |y|)^alpha}
double stable_levy_constant(double alpha, double scale) {
  return std::pow(scale, alpha) / (-2.0 * std::tgamma(-alpha) * std::cos(M_PI * alpha / 2.0));
}
}  // namespace

double phi_value(double y, const ModularSpec& spec) {
  const LevyTriplet& t = spec.triplet;
  y = std::abs(y);
  if (y == 0.0) return 0.0;
  double acc = y * y * t.gaussian_var;
  switch (t.jump_kind) {
    case LevyTriplet::JumpKind::none: break;
    case LevyTriplet::JumpKind::stable: {
      if (t.stable_alpha == 2.0) {
        acc += y * y * 2.0 * t.stable_scale * t.stable_scale;
        break;
      }
      if (t.stable_alpha <= 1.0) return kInf;
      acc += stable_levy_constant(t.stable_alpha, t.stable_scale) *
             stable_phi_shape(t.stable_alpha) * std::pow(y, t.stable_alpha);
      break;
    }
    case LevyTriplet::JumpKind::compound_poisson: {
      // quadrature against the jump law with kinks at |u y| = 1
      const JumpLaw& j = t.cp_jumps;
      const double knee = 1.0 / y;
      if (j.kind == JumpLaw::Kind::dirac) {
        acc += t.cp_rate * jump_phi_term(j.a, y);
        break;
      }
      double lo, hi;
      std::function<double(double)> dens;
      if (j.kind == JumpLaw::Kind::uniform) {
        lo = j.a;
        hi = j.b;
        const double d = 1.0 / (j.b - j.a);
        dens = [d](double) { return d; };
      } else {
        lo = j.a - 12.0 * j.b;
        hi = j.a + 12.0 * j.b;
        const double mu = j.a, sd = j.b;
        dens = [mu, sd](double u) {
          const double z = (u - mu) / sd;
          return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
        };
      }
      const double brk[] = {-knee, knee};
      QuadOptions opts;
      opts.abs_tol = 1e-12;
      opts.rel_tol = 1e-10;
      acc += t.cp_rate *
             integrate([&](double u) { return jump_phi_term(u, y) * dens(u); }, lo, hi, opts, brk)
                 .value;
      break;
    }
  }
  return acc;
}

double phi_doubling_constant(const ModularSpec& spec) {
  double worst = 0.0;
  for (double y = 1e-6; y < 1e6; y *= 1.7) {
    const double p1 = phi_value(y, spec);
    const double p2 = phi_value(2.0 * y, spec);
    if (p1 > 0.0 && std::isfinite(p2)) worst = std::max(worst, p2 / p1);
  }
  return worst;
}

TestFunction tf_box(double a, double b, double amp) {
  TestFunction f;
  f.eval = [a, b, amp](double s) { return (s >= a && s <= b) ? amp : 0.0; };
  f.lo = a;
  f.hi = b;
  std::ostringstream os;
  os << "box[" << a << "," << b << "]*" << amp;
  f.label = os.str();
  return f;
}

TestFunction tf_power_tail(double q, double lo) {
  TestFunction f;
  f.eval = [q](double s) { return std::pow(s, -q); };
  f.lo = lo;
  f.hi = kInf;
  std::ostringstream os;
  os << "s^-" << q << " on [" << lo << ",inf)";
  f.label = os.str();
  return f;
}

TestFunction tf_power_origin(double q, double hi) {
  TestFunction f;
  f.eval = [q](double s) { return std::pow(s, -q); };
  f.lo = 0.0;
  f.hi = hi;
  std::ostringstream os;
  os << "s^-" << q << " on (0," << hi << "]";
  f.label = os.str();
  return f;
}

TestFunction tf_tabulated(TabulatedKernel tab) {
  tab.validate();
  if (!tab.compact()) throw parameter_error("tf_tabulated: compact tables only");
  TestFunction f;
  f.lo = tab.knots.front();
  f.hi = tab.knots.back();
  f.breakpoints = tab.knots;
  auto shared = std::make_shared<TabulatedKernel>(std::move(tab));
  f.eval = [shared](double s) { return shared->value(s); };
  f.label = "tabulated";
  return f;
}

namespace {
// Dyadic window sweep with a ratio test: window masses of an integrable
// power tail decay geometrically; stalling masses flag divergence.
struct SweepState {
  double total = 0.0;
  double prev = -1.0;
  int stalled = 0;
  bool divergent = false;

  // returns true when the sweep can stop
  bool feed(double contribution) {
    if (!std::isfinite(contribution) || contribution > 1e300) {
      divergent = true;
      return true;
    }
    total += contribution;
    if (prev >= 0.0 && contribution >= 0.98 * prev &&
        contribution > 1e-14 * std::max(total, 1.0))
      ++stalled;
    else
      stalled = 0;
    if (stalled >= 4) {
      divergent = true;
      return true;
    }
    const bool negligible = contribution < 1e-13 * std::max(total, 1e-12);
    prev = contribution;
    return negligible;
  }
};
}  // namespace

ModularResult modular_integral(const TestFunction& g, const ModularSpec& spec, double c) {
  if (!(c > 0.0)) throw parameter_error("modular_integral: c must be > 0");
  auto integrand = [&](double s) { return phi_value(g.eval(s) / c, spec); };
  QuadOptions opts;
  opts.abs_tol = 1e-11;
  opts.rel_tol = 1e-8;
  opts.max_panels = 4000;
  opts.throw_on_failure = false;

  ModularResult out;
  const double span = std::isfinite(g.hi) ? g.hi - g.lo : 1.0;
  const double w0 = std::min(1.0, span);

  // windows shrinking into the left endpoint catch origin blow-ups
  SweepState inner;
  double b = g.lo + w0;
  bool inner_done = false;
  for (int k = 0; k < 70 && !inner_done; ++k) {
    const double a = g.lo + w0 * std::pow(0.5, k + 1);
    inner_done = inner.feed(integrate(integrand, a, b, opts, g.breakpoints).value);
    b = a;
  }
  if (inner.divergent) {
    out.divergent = true;
    out.value = inner.total;
    return out;
  }
  double total = inner.total;

  if (std::isfinite(g.hi)) {
    if (g.hi > g.lo + w0)
      total += integrate(integrand, g.lo + w0, g.hi, opts, g.breakpoints).value;
    out.value = total;
    return out;
  }

  // dyadic windows growing toward +infinity
  SweepState outer;
  double a = g.lo + w0, width = w0;
  for (int k = 0; k < 75; ++k) {
    const double hi = a + width;
    if (outer.feed(integrate(integrand, a, hi, opts, g.breakpoints).value)) break;
    a = hi;
    width *= 2.0;
  }
  if (outer.divergent) {
    out.divergent = true;
    out.value = total + outer.total;
    return out;
  }
  out.value = total + outer.total;
  return out;
}

NormResult lphi_norm(const TestFunction& g, const ModularSpec& spec, double rel_tol) {
  NormResult out;
  // zero function: modular is 0 for every c
  // probe a generous c to classify divergence
  auto probe = modular_integral(g, spec, 1e30);
  if (probe.divergent) {
    out.infinite = true;
    out.norm = kInf;
    return out;
  }
  if (probe.value == 0.0) {
    // check the function is actually ~0; modular at small c would blow otherwise
    auto small = modular_integral(g, spec, 1e-30);
    if (small.value == 0.0 && !small.divergent) {
      out.norm = 0.0;
      return out;
    }
  }

  auto mod = [&](double c) {
    auto r = modular_integral(g, spec, c);
    const double v = r.divergent ? kInf : r.value;
    out.trace.emplace_back(c, v);
    return v;
  };

  // bracket: when a Gaussian part is present, M(c) >= sigma^2 ||g||_2^2 / c^2,
  // so any c with M(c) <= 1 sits at or above sigma ||g||_2
  double lo = 1e-12, hi = 1.0;
  if (spec.triplet.gaussian_var > 0.0 && std::isfinite(g.hi)) {
    QuadOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-9;
    opts.throw_on_failure = false;
    const double l2 = integrate([&](double s) { const double v = g.eval(s); return v * v; },
                                g.lo, g.hi, opts, g.breakpoints)
                          .value;
    if (l2 > 0.0) lo = std::max(lo, std::sqrt(spec.triplet.gaussian_var * l2) * 0.5);
  }
  while (mod(hi) > 1.0 && hi < 1e300) hi *= 2.0;
  if (hi >= 1e300) {
    out.infinite = true;
    out.norm = kInf;
    return out;
  }
  while (mod(lo) <= 1.0 && lo > 1e-300) lo *= 0.5;

  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (mod(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= rel_tol * hi) break;
  }
  out.norm = hi;
  return out;
}

bool pma_admissible_analytic(const KernelSpec& kernel, const LevyTriplet& driver) {
  const bool stable = driver.is_stable() && driver.stable_alpha < 2.0;
  const double alpha = stable ? driver.stable_alpha : 2.0;
  // admissible exponent window for a power-type kernel
  const double origin_min = -1.0 / alpha;
  const double tail_max = 1.0 - 1.0 / alpha;
  switch (kernel.kind()) {
    case KernelSpec::Kind::indicator: return true;
    case KernelSpec::Kind::power:
      return kernel.power_beta() > origin_min && kernel.power_beta() < tail_max;
    case KernelSpec::Kind::trunc_power:
      // bounded at the origin; tail exponent H - 1/2 < 1/2 <= tail_max only
      // for finite variance. For stable, need H - 1/2 < 1 - 1/alpha.
      return kernel.trunc_H() - 0.5 < tail_max;
    case KernelSpec::Kind::tabulated: {
      if (kernel.table().compact()) return true;
      return *kernel.table().tail_exponent < tail_max;
    }
  }
  return false;
}

AdmissibilityReport pma_admissibility(const KernelSpec& kernel, const ModularSpec& spec,
                                      double t) {
  AdmissibilityReport rep;
  rep.admissible = pma_admissible_analytic(kernel, spec.triplet);

  // numeric diagnostic: Luxemburg norm of u -> f(t+u) - f(u_+ part)
  TestFunction h;
  h.lo = -t;
  h.hi = kInf;
  const KernelSpec k = kernel;
  h.eval = [k, t](double u) {
    const double lead = k.value(t + u);
    return u >= 0.0 ? lead - k.value(u) : lead;
  };
  h.breakpoints = {0.0};
  if (kernel.kind() == KernelSpec::Kind::trunc_power) {
    h.breakpoints.push_back(kernel.trunc_delta());
    h.breakpoints.push_back(kernel.trunc_delta() - t);
  }
  auto nr = lphi_norm(h, spec);
  rep.norm = nr.norm;
  rep.norm_infinite = nr.infinite;
  std::ostringstream os;
  os << "kernel " << kernel.describe() << ": analytic "
     << (rep.admissible ? "admissible" : "inadmissible");
  if (nr.infinite) os << "; numeric norm divergent";
  rep.detail = os.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Fubini verifier
// ---------------------------------------------------------------------------

double MeasureSpec::total_mass() const {
  double m = density * std::max(0.0, hi - lo);
  for (const auto& a : atoms) m += a.second;
  return m;
}

WeightedBivariateKernel WeightedBivariateKernel::box(double x0, double x1, double s0, double s1,
                                                     double amp, MeasureSpec mu) {
  WeightedBivariateKernel k;
  k.kind = Kind::box_product;
  k.x0 = x0;
  k.x1 = x1;
  k.s0 = s0;
  k.s1 = s1;
  k.amp = amp;
  k.mu = std::move(mu);
  return k;
}

WeightedBivariateKernel WeightedBivariateKernel::exp_triangle(double x_max, MeasureSpec mu) {
  WeightedBivariateKernel k;
  k.kind = Kind::exp_triangle;
  k.x1 = x_max;
  k.mu = std::move(mu);
  return k;
}

WeightedBivariateKernel WeightedBivariateKernel::profile_box(double x0, double x1,
                                                             TabulatedKernel g, MeasureSpec mu) {
  g.validate();
  WeightedBivariateKernel k;
  k.kind = Kind::profile_box;
  k.x0 = x0;
  k.x1 = x1;
  k.profile = std::move(g);
  k.mu = std::move(mu);
  return k;
}

double WeightedBivariateKernel::value(double x, double s) const {
  switch (kind) {
    case Kind::box_product:
      return (x >= x0 && x <= x1 && s >= s0 && s < s1) ? amp : 0.0;
    case Kind::exp_triangle:
      return (x >= 0.0 && x <= x1 && s >= 0.0 && s < x) ? std::exp(-x) : 0.0;
    case Kind::profile_box:
      return (x >= x0 && x <= x1) ? profile.value(s) : 0.0;
  }
  return 0.0;
}

double WeightedBivariateKernel::mu_integral(double s) const {
  auto mass_on = [&](double a, double b) {
    double m = mu.density * std::max(0.0, std::min(b, mu.hi) - std::max(a, mu.lo));
    for (const auto& at : mu.atoms)
      if (at.first >= a && at.first <= b) m += at.second;
    return m;
  };
  switch (kind) {
    case Kind::box_product:
      return (s >= s0 && s < s1) ? amp * mass_on(x0, x1) : 0.0;
    case Kind::exp_triangle: {
      if (s < 0.0 || s >= x1) return 0.0;
      // density part: int_s^{x1} e^{-x} rho dx; atoms at x > s add e^{-x}
      const double a = std::max(s, mu.lo), b = std::min(x1, mu.hi);
      double m = b > a ? mu.density * (std::exp(-a) - std::exp(-b)) : 0.0;
      for (const auto& at : mu.atoms)
        if (at.first > s && at.first <= x1) m += at.second * std::exp(-at.first);
      return m;
    }
    case Kind::profile_box:
      return profile.value(s) * mass_on(x0, x1);
  }
  return 0.0;
}

FubiniReport fubini_check(const WeightedBivariateKernel& kern, const LevyTriplet& driver,
                          const TimeGrid& grid, std::uint64_t seed, std::size_t m_paths,
                          const FubiniOptions& opts) {
  if (opts.levels < 1) throw parameter_error("fubini_check: need at least one level");
  if ((opts.x_cells & (opts.x_cells - 1)) != 0)
    throw parameter_error("fubini_check: x_cells must be a power of two");

  FubiniReport rep;

  // hypothesis check: int ||f_x||_phi mu(dx) < infinity, by quadrature over
  // the density part plus the atoms
  {
    ModularSpec mspec(driver);
    auto norm_at = [&](double x) {
      TestFunction fx;
      fx.lo = grid.t0;
      fx.hi = grid.t_max();
      const auto* kp = &kern;
      fx.eval = [kp, x](double s) { return kp->value(x, s); };
      auto nr = lphi_norm(fx, mspec, 1e-6);
      if (nr.infinite)
        throw integrability_error("fubini_check: ||f_x||_phi diverges at x=" + std::to_string(x));
      return nr.norm;
    };
    double acc = 0.0;
    if (kern.mu.density > 0.0 && kern.mu.hi > kern.mu.lo) {
      // modest fixed-node quadrature: the integrand is smooth in x and each
      // evaluation runs a full norm bisection
      const int nx = 17;
      double prev_x = kern.mu.lo, prev_v = norm_at(prev_x + 1e-12);
      for (int i = 1; i < nx; ++i) {
        const double x = kern.mu.lo + (kern.mu.hi - kern.mu.lo) * i / (nx - 1.0);
        const double v = norm_at(x - 1e-12);
        acc += 0.5 * (prev_v + v) * (x - prev_x) * kern.mu.density;
        prev_x = x;
        prev_v = v;
      }
    }
    for (const auto& at : kern.mu.atoms) acc += at.second * norm_at(at.first);
    rep.precondition_integral = acc;
    if (!std::isfinite(acc))
      throw integrability_error("fubini_check: hypothesis integral diverges");
  }

  const std::size_t factor_total = std::size_t(1) << (opts.levels - 1);
  if (grid.steps() % factor_total != 0)
    throw grid_error("fubini_check: cell count must divide by 2^(levels-1)");
  const TimeGrid fine(grid.t0, grid.dt / static_cast<double>(factor_total),
                      grid.steps() * factor_total + 1);

  // level 0 = finest grid; level L uses cells aggregated by 2^L
  std::vector<std::vector<double>> all_gaps(opts.levels,
                                            std::vector<double>(m_paths, 0.0));
  double lhs_sample = 0.0, rhs_sample = 0.0;

  parallel_for(m_paths, 0, [&](std::size_t p) {
    auto inc_fine = sample_levy_increments(driver, fine, derive_seed(seed, p));
    for (std::size_t lev = 0; lev < opts.levels; ++lev) {
      const std::size_t agg = std::size_t(1) << lev;
      IncrementSeries inc = agg > 1 ? aggregate_increments(inc_fine, agg) : inc_fine;
      const TimeGrid& g = inc.grid;
      const std::size_t ncells = inc.values.size();
      // per-x stochastic integrals with left-endpoint evaluation, then the
      // mu-quadrature over midpoint cells; the power-of-two cell count
      // halves with each aggregation so both discretizations refine together
      const std::size_t nx = std::max<std::size_t>(1, opts.x_cells / agg);
      double lhs = 0.0;
      if (kern.mu.density > 0.0 && kern.mu.hi > kern.mu.lo) {
        const double hx = (kern.mu.hi - kern.mu.lo) / static_cast<double>(nx);
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double xc = kern.mu.lo + (static_cast<double>(ix) + 0.5) * hx;
          double y = 0.0;
          for (std::size_t j = 0; j < ncells; ++j)
            y += kern.value(xc, g.time(j)) * inc.values[j];
          lhs += (hx * kern.mu.density) * y;
        }
      }
      for (const auto& at : kern.mu.atoms) {
        double y = 0.0;
        for (std::size_t j = 0; j < ncells; ++j)
          y += kern.value(at.first, g.time(j)) * inc.values[j];
        lhs += at.second * y;
      }
      double rhs = 0.0;
      for (std::size_t j = 0; j < ncells; ++j) rhs += kern.mu_integral(g.time(j)) * inc.values[j];
      all_gaps[lev][p] = std::abs(lhs - rhs);
      if (lev == 0 && p == 0) {
        lhs_sample = lhs;
        rhs_sample = rhs;
      }
    }
  });
  rep.lhs_sample = lhs_sample;
  rep.rhs_sample = rhs_sample;
  rep.finest_gaps = all_gaps[0];

  for (std::size_t lev = 0; lev < opts.levels; ++lev) {
    FubiniLevel L;
    L.dt = fine.dt * static_cast<double>(std::size_t(1) << lev);
    double s = 0.0, mx = 0.0;
    for (double gp : all_gaps[lev]) {
      s += gp;
      mx = std::max(mx, gp);
    }
    L.mean_gap = s / static_cast<double>(m_paths);
    L.max_gap = mx;
    rep.levels.push_back(L);
  }

  // log-log slope of mean gap vs dt (exact zeros excluded)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& L : rep.levels) {
    if (L.mean_gap <= 0.0) continue;
    const double X = std::log(L.dt), Y = std::log(L.mean_gap);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++n;
  }
  rep.slope = n >= 2 ? (static_cast<double>(n) * sxy - sx * sy) /
                           (static_cast<double>(n) * sxx - sx * sx)
                     : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Linear-growth bound
// ---------------------------------------------------------------------------

GrowthReport lp_growth_check(const PathEnsemble& ens, double p, const LevyTriplet* driver) {
  if (ens.paths.size() < 2) throw parameter_error("lp_growth_check: need at least two paths");
  if (!(p >= 1.0)) throw parameter_error("lp_growth_check: p must be >= 1");
  if (driver && driver->is_stable() && driver->stable_alpha < 2.0 && p >= driver->stable_alpha)
    throw unsupported_moment_error("lp_growth_check: p-th moment infinite for this stable driver");

  const std::size_t n = ens.grid.count;
  const std::size_t m = ens.paths.size();
  GrowthReport rep;
  rep.norms.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::pow(std::abs(ens.paths[i][k]), p);
    rep.norms[k] = std::pow(acc / static_cast<double>(m), 1.0 / p);
  }

  // minimal-mean affine majorant of (|t|, norm). The optimum of this LP is
  // attained on an edge of the upper convex hull (or at beta = 0).
  std::vector<std::pair<double, double>> pts(n);
  for (std::size_t k = 0; k < n; ++k) pts[k] = {std::abs(ens.grid.time(k)), rep.norms[k]};
  std::sort(pts.begin(), pts.end());

  std::vector<std::pair<double, double>> hull;  // upper hull, left to right
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (pt.second - a.second) -
                           (b.second - a.second) * (pt.first - a.first);
      if (cross >= 0.0)
        hull.pop_back();  // b below the a-pt chord: not on the upper hull
      else
        break;
    }
    if (!hull.empty() && hull.back().first == pt.first) {
      if (pt.second > hull.back().second) hull.back() = pt;
      continue;
    }
    hull.push_back(pt);
  }

  double best_alpha = 0.0, best_beta = 0.0, best_mean = kInf;
  auto consider = [&](double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) return;
    double alpha = 0.0;
    for (const auto& [x, y] : hull) alpha = std::max(alpha, y - beta * x);
    double mean = 0.0;
    for (const auto& [x, y] : pts) mean += alpha + beta * x;
    mean /= static_cast<double>(pts.size());
    if (mean < best_mean) {
      best_mean = mean;
      best_alpha = alpha;
      best_beta = beta;
    }
  };
  consider(0.0);
  for (std::size_t i = 0; i + 1 < hull.size(); ++i)
    consider((hull[i + 1].second - hull[i].second) / (hull[i + 1].first - hull[i].first));

  rep.alpha = best_alpha;
  rep.beta = best_beta;
  rep.violations = 0;
  rep.max_violation = 0.0;
  for (const auto& [x, y] : pts) {
    const double ex = y - (rep.alpha + rep.beta * x);
    if (ex > 0.0) {
      ++rep.violations;
      rep.max_violation = std::max(rep.max_violation, ex);
    }
  }

  double mod = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += std::pow(std::abs(ens.paths[i][k + 1] - ens.paths[i][k]), p);
    mod = std::max(mod, std::pow(acc / static_cast<double>(m), 1.0 / p));
  }
  rep.continuity_modulus = mod;
  return rep;
}

}  // namespace qou
