#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qou/errors.hpp"
#include "qou/quadrature.hpp"

namespace qou {

// Piecewise-linear function on [knots.front(), knots.back()], zero outside
// unless a tail exponent is declared, in which case it continues as
// values.back() * (t / knots.back())^tail_exponent beyond the last knot.
struct TabulatedKernel {
  std::vector<double> knots;
  std::vector<double> values;
  std::optional<double> tail_exponent;

  void validate() const;
  double value(double t) const;
  double integral_from_zero(double x) const;  // int_0^x
  bool compact() const { return !tail_exponent.has_value(); }
};

// Deterministic moving-average kernel f with f = 0 on (-inf, 0):
//   indicator      f(t) = 1_{t >= 0}
//   power          f(t) = c * t_+^beta,             beta > -1
//   trunc_power    f(t) = r0 * (delta v t)^(H-1/2)  on t >= 0
//   tabulated      piecewise linear, optional power tail
// plus an optional compactly supported bump subtracted from any of these.
class KernelSpec {
 public:
  enum class Kind { indicator, power, trunc_power, tabulated };

  static KernelSpec indicator();
  static KernelSpec power(double c, double beta);
  static KernelSpec trunc_power(double r0, double delta, double H);
  static KernelSpec tabulated(TabulatedKernel tab);
  // base with a compact bounded bump subtracted: f = base - bump
  static KernelSpec perturbed(KernelSpec base, TabulatedKernel bump);

  Kind kind() const { return kind_; }
  bool has_bump() const { return bump_.has_value(); }
  const TabulatedKernel* bump() const { return bump_ ? &*bump_ : nullptr; }

  double power_c() const { return c_; }
  double power_beta() const { return beta_; }
  double trunc_r0() const { return c_; }
  double trunc_delta() const { return delta_; }
  double trunc_H() const { return H_; }
  const TabulatedKernel& table() const { return tab_; }

  // Pointwise f(t); zero for t < 0. Singular kernels return +inf at t = 0.
  double value(double t) const;

  // F(x) = int_0^x f(u) du (0 for x <= 0); exact per variant.
  double integral_from_zero(double x) const;

  // True if f(t) -> 0 as t -> inf.
  bool vanishes_at_infinity() const;

  // Least exponent p with f(t) = O(t^p) as t -> 0+ (kernel continuous at 0+
  // iff p >= 0); used by singularity-aware quadratures.
  double origin_exponent() const;

  std::string describe() const;

 private:
  KernelSpec() = default;
  Kind kind_ = Kind::indicator;
  double c_ = 1.0;      // power coefficient / trunc_power r0
  double beta_ = 0.0;   // power exponent
  double delta_ = 0.0;  // trunc_power knee
  double H_ = 0.5;      // trunc_power index
  TabulatedKernel tab_;
  std::optional<TabulatedKernel> bump_;

  friend double psi_weighted_integral(const KernelSpec&, double, double);
};

// Normalizing constant sqrt(2H sin(pi H) Gamma(2H)) / Gamma(H + 1/2): the
// power kernel c_H t_+^(H-1/2) with a unit-variance driver then has unit
// variance at t = 1.
double c_H_constant(double H);

// I(x) = int_0^x e^{-lambda (x-s)} f(s) ds. Also the running integral of the
// transformed kernel: int_0^x psi_f = I(x).
double psi_weighted_integral(const KernelSpec& kernel, double lambda, double x);

// psi_f(t) = f(t) - lambda * I(t) for t >= 0, 0 for t < 0. Large lambda*t is
// evaluated through the integration-by-parts form to dodge cancellation.
double psi_value(const KernelSpec& kernel, double lambda, double t);

// Same quantity forced through generic quadrature of the weighted integral;
// cross-check for the closed-form branches.
double psi_value_generic(const KernelSpec& kernel, double lambda, double t);

struct PsiEval {
  double lambda = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  enum class Method { closed_form, quadrature } method = Method::quadrature;
};

PsiEval psi_transform(const KernelSpec& kernel, double lambda, std::vector<double> times);

// Exact cell averages of psi over [k*dt, (k+1)*dt), k = 0..count-1, via the
// running-integral recursion (no pointwise evaluation of singular psi).
std::vector<double> psi_cell_averages(const KernelSpec& kernel, double lambda, double dt,
                                      std::size_t count);

// Cell averages of f itself over the same cells, from the exact cumulative.
std::vector<double> kernel_cell_averages(const KernelSpec& kernel, double dt, std::size_t count);

// Predicted large-t behavior of psi_f.
struct TailAsymptote {
  bool exponential = false;  // psi ~ constant * exp(-lambda t): no power tail
  double exponent = 0.0;     // psi ~ constant * t^exponent otherwise
  double constant = 0.0;
};

TailAsymptote psi_tail_asymptote(const KernelSpec& kernel, double lambda);

struct CancellationReport {
  double direct = 0.0;       // adaptive quadrature of psi over [0, T]
  double closed_form = 0.0;  // I(T), the running-integral identity
  double absolute = 0.0;     // int_0^T |psi|
};

CancellationReport cancellation_integral(const KernelSpec& kernel, double lambda, double T);

}  // namespace qou
