#include "qou/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qou {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-kWindow) is below 2e-22; weighted integrals are windowed to
// [x - kWindow/lambda, x] and the remainder dropped.
constexpr double kWindow = 50.0;
// switch point between the direct form of psi and the integration-by-parts
// form (the direct form loses ~log10(lambda t) digits to cancellation).
constexpr double kIbpThreshold = 60.0;

QuadOptions tight_opts() {
  QuadOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  o.max_panels = 6000;
  return o;
}
}  // namespace

// ---------------------------------------------------------------------------
// TabulatedKernel
// ---------------------------------------------------------------------------

void TabulatedKernel::validate() const {
  if (knots.size() < 2 || knots.size() != values.size())
    throw parameter_error("TabulatedKernel: need >= 2 knots with matching values");
  if (knots.front() < 0.0) throw parameter_error("TabulatedKernel: knots must be >= 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw parameter_error("TabulatedKernel: knots must increase");
  for (double v : values)
    if (!std::isfinite(v)) throw parameter_error("TabulatedKernel: values must be finite");
  if (tail_exponent && !(knots.back() > 0.0))
    throw parameter_error("TabulatedKernel: tail extension needs a positive last knot");
}

double TabulatedKernel::value(double t) const {
  if (t < knots.front() || t < 0.0) return 0.0;
  if (t > knots.back()) {
    if (!tail_exponent) return 0.0;
    return values.back() * std::pow(t / knots.back(), *tail_exponent);
  }
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const std::size_t i = std::min<std::size_t>(knots.size() - 1, it - knots.begin()) - 1;
  const double w = (t - knots[i]) / (knots[i + 1] - knots[i]);
  return values[i] + w * (values[i + 1] - values[i]);
}

double TabulatedKernel::integral_from_zero(double x) const {
  if (x <= knots.front()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (x <= a) break;
    const double hi = std::min(x, b);
    const double va = values[i];
    const double slope = (values[i + 1] - values[i]) / (b - a);
    const double w = hi - a;
    acc += va * w + 0.5 * slope * w * w;
  }
  if (x > knots.back() && tail_exponent) {
    const double q = *tail_exponent;
    const double k = knots.back(), v = values.back();
    if (std::abs(q + 1.0) < 1e-14)
      acc += v * k * std::log(x / k);
    else
      acc += v * k / (q + 1.0) * (std::pow(x / k, q + 1.0) - 1.0);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// KernelSpec construction
// ---------------------------------------------------------------------------

KernelSpec KernelSpec::indicator() {
  KernelSpec k;
  k.kind_ = Kind::indicator;
  return k;
}

KernelSpec KernelSpec::power(double c, double beta) {
  if (!(beta > -1.0)) throw parameter_error("KernelSpec::power: exponent must be > -1");
  if (!std::isfinite(c) || c == 0.0) throw parameter_error("KernelSpec::power: need nonzero c");
  KernelSpec k;
  k.kind_ = Kind::power;
  k.c_ = c;
  k.beta_ = beta;
  return k;
}

KernelSpec KernelSpec::trunc_power(double r0, double delta, double H) {
  if (!(H > 0.0 && H < 1.0)) throw parameter_error("KernelSpec::trunc_power: H must be in (0,1)");
  if (r0 == 0.0) throw parameter_error("KernelSpec::trunc_power: r0 must be nonzero");
  if (!(delta >= 0.0)) throw parameter_error("KernelSpec::trunc_power: delta must be >= 0");
  if (delta == 0.0 && H != 0.5) return power(r0, H - 0.5);  // exact reduction
  KernelSpec k;
  if (delta == 0.0) {  // H = 1/2: constant r0 on the positive axis
    k.kind_ = Kind::power;
    k.c_ = r0;
    k.beta_ = 0.0;
    return k;
  }
  k.kind_ = Kind::trunc_power;
  k.c_ = r0;
  k.delta_ = delta;
  k.H_ = H;
  return k;
}

KernelSpec KernelSpec::tabulated(TabulatedKernel tab) {
  tab.validate();
  KernelSpec k;
  k.kind_ = Kind::tabulated;
  k.tab_ = std::move(tab);
  return k;
}

KernelSpec KernelSpec::perturbed(KernelSpec base, TabulatedKernel bump) {
  bump.validate();
  if (!bump.compact()) throw parameter_error("KernelSpec::perturbed: bump must be compactly supported");
  if (base.bump_) throw parameter_error("KernelSpec::perturbed: base already carries a bump");
  base.bump_ = std::move(bump);
  return base;
}

double KernelSpec::value(double t) const {
  double v = 0.0;
  if (t >= 0.0) {
    switch (kind_) {
      case Kind::indicator: v = 1.0; break;
      case Kind::power:
        if (t == 0.0)
          v = beta_ > 0.0 ? 0.0 : (beta_ == 0.0 ? c_ : (c_ > 0 ? kInf : -kInf));
        else
          v = c_ * std::pow(t, beta_);
        break;
      case Kind::trunc_power: v = c_ * std::pow(std::max(delta_, t), H_ - 0.5); break;
      case Kind::tabulated: v = tab_.value(t); break;
    }
  }
  if (bump_) v -= bump_->value(t);
  return v;
}

double KernelSpec::integral_from_zero(double x) const {
  if (x <= 0.0) return 0.0;
  double acc = 0.0;
  switch (kind_) {
    case Kind::indicator: acc = x; break;
    case Kind::power: acc = c_ * std::pow(x, beta_ + 1.0) / (beta_ + 1.0); break;
    case Kind::trunc_power: {
      const double flat = c_ * std::pow(delta_, H_ - 0.5);
      if (x <= delta_) {
        acc = flat * x;
      } else {
        acc = flat * delta_ +
              c_ / (H_ + 0.5) * (std::pow(x, H_ + 0.5) - std::pow(delta_, H_ + 0.5));
      }
      break;
    }
    case Kind::tabulated: acc = tab_.integral_from_zero(x); break;
  }
  if (bump_) acc -= bump_->integral_from_zero(x);
  return acc;
}

bool KernelSpec::vanishes_at_infinity() const {
  switch (kind_) {
    case Kind::indicator: return false;
    case Kind::power: return beta_ < 0.0;
    case Kind::trunc_power: return H_ < 0.5;
    case Kind::tabulated: return tab_.compact() || *tab_.tail_exponent < 0.0;
  }
  return false;
}

double KernelSpec::origin_exponent() const {
  switch (kind_) {
    case Kind::power: return beta_;
    default: return 0.0;
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::indicator: os << "indicator"; break;
    case Kind::power: os << "power(c=" << c_ << ", beta=" << beta_ << ")"; break;
    case Kind::trunc_power:
      os << "trunc_power(r0=" << c_ << ", delta=" << delta_ << ", H=" << H_ << ")";
      break;
    case Kind::tabulated: os << "tabulated(" << tab_.knots.size() << " knots)"; break;
  }
  if (bump_) os << " - bump(" << bump_->knots.size() << " knots)";
  return os.str();
}

double c_H_constant(double H) {
  if (!(H > 0.0 && H < 1.0)) throw parameter_error("c_H_constant: H must be in (0,1)");
  return std::sqrt(2.0 * H * std::sin(M_PI * H) * std::tgamma(2.0 * H)) /
         std::tgamma(H + 0.5);
}

// ---------------------------------------------------------------------------
// Weighted integral I(x) = int_0^x e^{-lambda (x-s)} f(s) ds
// ---------------------------------------------------------------------------

namespace {

// Weighted integral over [a,b] with weight anchored at x (>= b):
// int_a^b e^{-lambda (x-s)} f(s) ds for the non-bump part of the kernel.
// Assumes [a,b] avoids the power singularity unless a == 0.
double weighted_piece_power(double c, double beta, double lambda, double x, double a, double b) {
  if (b <= a) return 0.0;
  auto g = [&](double s) { return c * std::exp(-lambda * (x - s)); };
  if (a == 0.0 && beta < 0.0) {
    return integrate_power_left(g, beta, 0.0, b, tight_opts()).value;
  }
  auto full = [&](double s) { return g(s) * std::pow(s, beta); };
  return integrate(full, a, b, tight_opts()).value;
}

// Closed form int_a^b e^{-lambda (x-s)} * const ds.
double weighted_piece_const(double flat, double lambda, double x, double a, double b) {
  if (b <= a) return 0.0;
  return flat / lambda * (std::exp(-lambda * (x - b)) - std::exp(-lambda * (x - a)));
}

// Closed form over a linear piece f(s) = va + slope*(s-a) on [a,b], weight
// anchored at x >= b. Antiderivative of e^{lambda s} (va + slope(s-a)) is
// e^{lambda s} [ f(s)/lambda - slope/lambda^2 ].
double weighted_piece_linear(double va, double slope, double lambda, double x, double a, double b) {
  if (b <= a) return 0.0;
  const double fb = va + slope * (b - a);
  const double hi = std::exp(-lambda * (x - b)) * (fb / lambda - slope / (lambda * lambda));
  const double lo = std::exp(-lambda * (x - a)) * (va / lambda - slope / (lambda * lambda));
  return hi - lo;
}

double weighted_tabulated(const TabulatedKernel& tab, double lambda, double x) {
  double acc = 0.0;
  const double last = tab.knots.back();
  for (std::size_t i = 0; i + 1 < tab.knots.size(); ++i) {
    const double a = tab.knots[i], b = tab.knots[i + 1];
    if (x <= a) break;
    const double hi = std::min(x, b);
    const double slope = (tab.values[i + 1] - tab.values[i]) / (b - a);
    acc += weighted_piece_linear(tab.values[i], slope, lambda, x, a, hi);
  }
  if (x > last && tab.tail_exponent) {
    const double q = *tab.tail_exponent;
    const double cc = tab.values.back() / std::pow(last, q);
    const double lo = std::max(last, x - kWindow / lambda);
    acc += weighted_piece_power(cc, q, lambda, x, lo, x);
  }
  return acc;
}

double weighted_integral_base(const KernelSpec& k, double lambda, double x) {
  switch (k.kind()) {
    case KernelSpec::Kind::indicator:
      return (1.0 - std::exp(-lambda * x)) / lambda;
    case KernelSpec::Kind::power: {
      const double lo = std::max(0.0, x - kWindow / lambda);
      return weighted_piece_power(k.power_c(), k.power_beta(), lambda, x, lo, x);
    }
    case KernelSpec::Kind::trunc_power: {
      const double d = k.trunc_delta();
      const double flat = k.trunc_r0() * std::pow(d, k.trunc_H() - 0.5);
      if (x <= d) return flat * (1.0 - std::exp(-lambda * x)) / lambda;
      double acc = weighted_piece_const(flat, lambda, x, 0.0, d);
      const double lo = std::max(d, x - kWindow / lambda);
      acc += weighted_piece_power(k.trunc_r0(), k.trunc_H() - 0.5, lambda, x, lo, x);
      return acc;
    }
    case KernelSpec::Kind::tabulated:
      return weighted_tabulated(k.table(), lambda, x);
  }
  return 0.0;
}

// Derivative of the non-bump part where it is smooth (used by the
// integration-by-parts branch, which only looks at arguments deep in the
// smooth region).
double base_derivative(const KernelSpec& k, double t) {
  switch (k.kind()) {
    case KernelSpec::Kind::indicator: return 0.0;
    case KernelSpec::Kind::power:
      return k.power_beta() == 0.0 ? 0.0
                                   : k.power_c() * k.power_beta() * std::pow(t, k.power_beta() - 1.0);
    case KernelSpec::Kind::trunc_power:
      if (t <= k.trunc_delta()) return 0.0;
      return k.trunc_r0() * (k.trunc_H() - 0.5) * std::pow(t, k.trunc_H() - 1.5);
    case KernelSpec::Kind::tabulated: {
      const auto& tab = k.table();
      if (t > tab.knots.back() && tab.tail_exponent) {
        const double q = *tab.tail_exponent;
        const double cc = tab.values.back() / std::pow(tab.knots.back(), q);
        return cc * q * std::pow(t, q - 1.0);
      }
      return 0.0;  // not needed: compact tables are closed-form beyond support
    }
  }
  return 0.0;
}

// Earliest time from which the non-bump part is continuously differentiable
// with the power-type derivative above, or +inf when the IBP branch does
// not apply.
double smooth_from(const KernelSpec& k) {
  switch (k.kind()) {
    case KernelSpec::Kind::indicator: return kInf;  // closed form anyway
    case KernelSpec::Kind::power: return 0.0;
    case KernelSpec::Kind::trunc_power: return k.trunc_delta();
    case KernelSpec::Kind::tabulated:
      return k.table().tail_exponent ? k.table().knots.back() : kInf;
  }
  return kInf;
}

TailAsymptote tail_base(const KernelSpec& k, double lambda);

// f without the bump part (KernelSpec::value subtracts the bump).
double base_value(const KernelSpec& k, double t) {
  if (t < 0.0) return 0.0;
  switch (k.kind()) {
    case KernelSpec::Kind::indicator: return 1.0;
    case KernelSpec::Kind::power:
      if (t == 0.0)
        return k.power_beta() > 0.0
                   ? 0.0
                   : (k.power_beta() == 0.0 ? k.power_c()
                                            : std::copysign(kInf, k.power_c()));
      return k.power_c() * std::pow(t, k.power_beta());
    case KernelSpec::Kind::trunc_power:
      return k.trunc_r0() * std::pow(std::max(k.trunc_delta(), t), k.trunc_H() - 0.5);
    case KernelSpec::Kind::tabulated: return k.table().value(t);
  }
  return 0.0;
}

// Weighted integral of the bump alone.
double weighted_bump(const TabulatedKernel& bump, double lambda, double x) {
  const double last = bump.knots.back();
  if (x <= last) return weighted_tabulated(bump, lambda, x);
  // beyond support the integral just decays: I_b(x) = e^{-lambda(x-last)} I_b(last)
  return std::exp(-lambda * (x - last)) * weighted_tabulated(bump, lambda, last);
}

double psi_base_value(const KernelSpec& k, double lambda, double t) {
  if (t < 0.0) return 0.0;
  if (k.kind() == KernelSpec::Kind::indicator) return std::exp(-lambda * t);
  if (k.kind() == KernelSpec::Kind::power && k.power_beta() == 0.0)
    return k.power_c() * std::exp(-lambda * t);
  if (k.kind() == KernelSpec::Kind::tabulated && !k.table().tail_exponent &&
      t > k.table().knots.back()) {
    const double last = k.table().knots.back();
    return -lambda * std::exp(-lambda * (t - last)) * weighted_tabulated(k.table(), lambda, last);
  }

  const double a = t - kWindow / lambda;
  const bool use_ibp = lambda * t > kIbpThreshold && a > smooth_from(k) * 1.0001 + 1e-300;
  if (!use_ibp) return base_value(k, t) - lambda * weighted_integral_base(k, lambda, t);

  // psi(t) = e^{-lambda (t-a)} psi(a) + int_a^t e^{-lambda (t-s)} f'(s) ds;
  // the first term is below 2e-22 * psi-scale, approximated by the tail law.
  auto g = [&](double u) { return std::exp(-lambda * u) * base_derivative(k, t - u); };
  const double main = integrate(g, 0.0, t - a, tight_opts()).value;
  double psi_a_proxy = 0.0;
  TailAsymptote asym = tail_base(k, lambda);
  if (!asym.exponential && asym.constant != 0.0)
    psi_a_proxy = asym.constant * std::pow(a, asym.exponent);
  return main + std::exp(-lambda * (t - a)) * psi_a_proxy;
}

}  // namespace

double psi_weighted_integral(const KernelSpec& kernel, double lambda, double x) {
  if (!(lambda > 0.0)) throw parameter_error("psi_weighted_integral: lambda must be > 0");
  if (x <= 0.0) return 0.0;
  double acc = weighted_integral_base(kernel, lambda, x);
  if (kernel.has_bump()) acc -= weighted_bump(*kernel.bump(), lambda, x);
  return acc;
}

double psi_value(const KernelSpec& kernel, double lambda, double t) {
  if (!(lambda > 0.0)) throw parameter_error("psi_value: lambda must be > 0");
  if (t < 0.0) return 0.0;
  double v = psi_base_value(kernel, lambda, t);
  if (kernel.has_bump()) {
    const TabulatedKernel& b = *kernel.bump();
    const double vb = b.value(t) - lambda * weighted_bump(b, lambda, t);
    v -= vb;
  }
  return v;
}

double psi_value_generic(const KernelSpec& kernel, double lambda, double t) {
  if (t < 0.0) return 0.0;
  auto f = [&](double s) { return kernel.value(s) * std::exp(-lambda * (t - s)); };
  QuadOptions opts = tight_opts();
  QuadResult r;
  const double p = kernel.origin_exponent();
  if (p < 0.0) {
    auto g = [&](double s) {
      return kernel.value(s) / std::pow(s, p) * std::exp(-lambda * (t - s));
    };
    r = integrate_power_left(g, p, 0.0, t, opts);
  } else {
    std::vector<double> brk;
    if (kernel.kind() == KernelSpec::Kind::trunc_power) brk.push_back(kernel.trunc_delta());
    if (kernel.kind() == KernelSpec::Kind::tabulated)
      brk.assign(kernel.table().knots.begin(), kernel.table().knots.end());
    if (const auto* b = kernel.bump())
      brk.insert(brk.end(), b->knots.begin(), b->knots.end());
    r = integrate(f, 0.0, t, opts, brk);
  }
  return kernel.value(t) - lambda * r.value;
}

PsiEval psi_transform(const KernelSpec& kernel, double lambda, std::vector<double> times) {
  if (!(lambda > 0.0)) throw parameter_error("psi_transform: lambda must be > 0");
  PsiEval out;
  out.lambda = lambda;
  out.values.reserve(times.size());
  const bool closed = kernel.kind() == KernelSpec::Kind::indicator ||
                      (kernel.kind() == KernelSpec::Kind::tabulated && kernel.table().compact());
  out.method = closed ? PsiEval::Method::closed_form : PsiEval::Method::quadrature;
  for (double t : times) out.values.push_back(psi_value(kernel, lambda, t));
  out.times = std::move(times);
  return out;
}

std::vector<double> psi_cell_averages(const KernelSpec& kernel, double lambda, double dt,
                                      std::size_t count) {
  if (!(dt > 0.0)) throw grid_error("psi_cell_averages: dt must be > 0");
  std::vector<double> out(count);
  const double decay = std::exp(-lambda * dt);
  double I = 0.0;  // running I(k*dt)
  for (std::size_t k = 0; k < count; ++k) {
    const double b = static_cast<double>(k + 1) * dt;
    // C_k = int_{k dt}^{(k+1) dt} e^{-lambda (b - s)} f(s) ds
    const double C = psi_weighted_integral(kernel, lambda, b) - decay * I;
    out[k] = (C - (1.0 - decay) * I) / dt;
    I = decay * I + C;
  }
  return out;
}

std::vector<double> kernel_cell_averages(const KernelSpec& kernel, double dt, std::size_t count) {
  if (!(dt > 0.0)) throw grid_error("kernel_cell_averages: dt must be > 0");
  std::vector<double> out(count);
  double prev = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double next = kernel.integral_from_zero(static_cast<double>(k + 1) * dt);
    out[k] = (next - prev) / dt;
    prev = next;
  }
  return out;
}

namespace {
TailAsymptote tail_base(const KernelSpec& k, double lambda) {
  TailAsymptote t;
  switch (k.kind()) {
    case KernelSpec::Kind::indicator:
      t.exponential = true;
      t.constant = 1.0;
      return t;
    case KernelSpec::Kind::power:
      if (k.power_beta() == 0.0) {
        t.exponential = true;
        t.constant = k.power_c();
        return t;
      }
      t.exponent = k.power_beta() - 1.0;
      t.constant = k.power_c() * k.power_beta() / lambda;
      return t;
    case KernelSpec::Kind::trunc_power:
      t.exponent = k.trunc_H() - 1.5;
      t.constant = k.trunc_r0() * (k.trunc_H() - 0.5) / lambda;
      return t;
    case KernelSpec::Kind::tabulated:
      if (!k.table().tail_exponent)
        throw parameter_error(
            "psi_tail_asymptote: tabulated kernel carries no declared tail exponent");
      {
        const double q = *k.table().tail_exponent;
        const double cc = k.table().values.back() / std::pow(k.table().knots.back(), q);
        if (q == 0.0) {
          t.exponential = true;
          t.constant = cc;
          return t;
        }
        t.exponent = q - 1.0;
        t.constant = cc * q / lambda;
        return t;
      }
  }
  return t;
}
}  // namespace

TailAsymptote psi_tail_asymptote(const KernelSpec& kernel, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("psi_tail_asymptote: lambda must be > 0");
  // a compact bump only adds an exponentially decaying term
  return tail_base(kernel, lambda);
}

CancellationReport cancellation_integral(const KernelSpec& kernel, double lambda, double T) {
  if (!(lambda > 0.0)) throw parameter_error("cancellation_integral: lambda must be > 0");
  if (!(T > 0.0)) throw parameter_error("cancellation_integral: T must be > 0");

  CancellationReport rep;
  rep.closed_form = psi_weighted_integral(kernel, lambda, T);

  auto psi = [&](double s) { return psi_value(kernel, lambda, s); };

  // breakpoints: kernel structure plus decades, plus sign changes of psi
  std::vector<double> brk;
  if (kernel.kind() == KernelSpec::Kind::trunc_power) brk.push_back(kernel.trunc_delta());
  if (kernel.kind() == KernelSpec::Kind::tabulated)
    brk.assign(kernel.table().knots.begin(), kernel.table().knots.end());
  if (const auto* b = kernel.bump()) brk.insert(brk.end(), b->knots.begin(), b->knots.end());
  for (double d = 1e-6; d < T; d *= 4.0) brk.push_back(d);

  QuadOptions opts;
  opts.abs_tol = 1e-11;
  opts.rel_tol = 1e-9;
  opts.max_panels = 20000;
  rep.direct = integrate(psi, 0.0, T, opts, brk).value;

  // locate sign changes on a log scan so |psi| integrates cleanly
  std::vector<double> crossings = brk;
  double prev_s = T * 1e-9, prev_v = psi(prev_s);
  for (int i = 1; i <= 260; ++i) {
    const double s = prev_s == 0.0 ? 0.0 : T * 1e-9 * std::pow(1e9, i / 260.0);
    const double v = psi(s);
    if (prev_v * v < 0.0) {
      double lo = prev_s, hi = s, vlo = prev_v;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = psi(mid);
        if (vlo * vm <= 0.0)
          hi = mid;
        else
          lo = mid, vlo = vm;
      }
      crossings.push_back(0.5 * (lo + hi));
    }
    prev_s = s;
    prev_v = v;
  }
  rep.absolute = integrate([&](double s) { return std::abs(psi(s)); }, 0.0, T, opts, crossings).value;
  return rep;
}

}  // namespace qou
