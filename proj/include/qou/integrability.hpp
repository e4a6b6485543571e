#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qou/drivers.hpp"
#include "qou/kernels.hpp"
#include "qou/paths.hpp"
#include "qou/time_grid.hpp"

namespace qou {

// Driver law viewed through its integrability modular: the function
// phi(y) = y^2 sigma^2 + int [ (uy)^2 1_{|uy|<=1} + (2|uy|-1) 1_{|uy|>1} ] nu(du),
// with Lebesgue base measure on the line.
struct ModularSpec {
  LevyTriplet triplet;

  explicit ModularSpec(LevyTriplet t) : triplet(std::move(t)) { triplet.validate(); }
};

// phi(y); +infinity for stable alpha <= 1 (the centered integrable framework
// needs alpha > 1).
double phi_value(double y, const ModularSpec& spec);

// Doubling constant sup phi(2y)/phi(y), estimated over a log grid.
double phi_doubling_constant(const ModularSpec& spec);

// Function on the real line with explicit support and kink hints.
struct TestFunction {
  std::function<double(double)> eval;
  double lo = 0.0;
  double hi = 1.0;  // +infinity allowed
  std::vector<double> breakpoints;
  std::string label;
};

TestFunction tf_box(double a, double b, double amp = 1.0);
TestFunction tf_power_tail(double q, double lo = 1.0);    // s^-q on [lo, inf)
TestFunction tf_power_origin(double q, double hi = 1.0);  // s^-q on (0, hi]
TestFunction tf_tabulated(TabulatedKernel tab);

struct ModularResult {
  double value = 0.0;
  bool divergent = false;
};

// int phi(g(s)/c) ds over the support of g, with divergence detection on
// unbounded domains.
ModularResult modular_integral(const TestFunction& g, const ModularSpec& spec, double c);

struct NormResult {
  double norm = 0.0;   // +infinity when the modular diverges for every c
  bool infinite = false;
  std::vector<std::pair<double, double>> trace;  // (c, modular) bisection trace
};

// Luxemburg norm inf{ c > 0 : int phi(g/c) dm <= 1 } by bisection.
NormResult lphi_norm(const TestFunction& g, const ModularSpec& spec, double rel_tol = 1e-8);

// Analytic admissibility of s -> f(t-s) - f(-s) against the driver:
// finite variance needs the origin exponent in (-1/2, 1/2); symmetric stable
// alpha needs it in (-1/alpha, 1 - 1/alpha). Indicator and compact tables
// are always admissible.
bool pma_admissible_analytic(const KernelSpec& kernel, const LevyTriplet& driver);

struct AdmissibilityReport {
  bool admissible = false;
  double norm = 0.0;  // Luxemburg norm of the increment kernel (diagnostic)
  bool norm_infinite = false;
  std::string detail;
};

// Full check at a given t: analytic criterion plus the numeric norm of
// s -> f(t-s) - f(-s).
AdmissibilityReport pma_admissibility(const KernelSpec& kernel, const ModularSpec& spec, double t);

// ---------------------------------------------------------------------------
// Stochastic Fubini verifier
// ---------------------------------------------------------------------------

// Finite measure on the x-domain: uniform density on [lo, hi] and/or atoms.
struct MeasureSpec {
  double lo = 0.0, hi = 0.0;
  double density = 0.0;  // uniform density on [lo, hi]
  std::vector<std::pair<double, double>> atoms;

  double total_mass() const;
};

// Bivariate kernels f(x, s) with closed-form x-integrals:
//   box_product   amp * 1_{[x0,x1]}(x) * 1_{[s0,s1]}(s)
//   exp_triangle  e^{-x} * 1_{[0,x]}(s)         (x-domain [0, x_max])
//   profile_box   1_{[x0,x1]}(x) * g(s)         (g tabulated)
struct WeightedBivariateKernel {
  enum class Kind { box_product, exp_triangle, profile_box };
  Kind kind = Kind::box_product;
  double x0 = 0.0, x1 = 1.0;
  double s0 = 0.0, s1 = 1.0;
  double amp = 1.0;
  TabulatedKernel profile;
  MeasureSpec mu;

  static WeightedBivariateKernel box(double x0, double x1, double s0, double s1, double amp,
                                     MeasureSpec mu);
  static WeightedBivariateKernel exp_triangle(double x_max, MeasureSpec mu);
  static WeightedBivariateKernel profile_box(double x0, double x1, TabulatedKernel g,
                                             MeasureSpec mu);

  double value(double x, double s) const;
  // g(s) = int f(x, s) mu(dx), closed form
  double mu_integral(double s) const;
};

struct FubiniLevel {
  double dt = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
};

struct FubiniReport {
  double precondition_integral = 0.0;  // int ||f_x||_phi mu(dx), numeric
  std::vector<FubiniLevel> levels;     // finest first
  double slope = 0.0;                  // log-log decay rate of the mean gap
  std::vector<double> finest_gaps;     // per path at the finest level
  double lhs_sample = 0.0, rhs_sample = 0.0;
};

struct FubiniOptions {
  std::size_t x_cells = 256;   // power of two: step kernels then reduce exactly
  std::size_t levels = 4;      // grid halvings (finest sampled once, aggregated)
  double phi_check_budget = 1.0;
};

// Simulates the driver once per path at the finest grid (common random
// numbers), evaluates both sides of the interchange at each refinement
// level, and reports the per-path gaps and their decay.
FubiniReport fubini_check(const WeightedBivariateKernel& kern, const LevyTriplet& driver,
                          const TimeGrid& grid, std::uint64_t seed, std::size_t m_paths,
                          const FubiniOptions& opts = {});

// ---------------------------------------------------------------------------
// Linear-growth bound
// ---------------------------------------------------------------------------

struct GrowthReport {
  double alpha = 0.0;  // affine majorant alpha + beta |t|
  double beta = 0.0;
  std::size_t violations = 0;     // grid points above the majorant
  double max_violation = 0.0;     // largest exceedance (should be 0)
  double continuity_modulus = 0.0;  // max_k || N_{t_{k+1}} - N_{t_k} ||_p
  std::vector<double> norms;      // || N_t ||_p on the grid
};

// Estimates ||N_t||_p over the ensemble, fits the minimal affine majorant
// over the grid, and reports violations and the L^p continuity modulus.
GrowthReport lp_growth_check(const PathEnsemble& ens, double p,
                             const LevyTriplet* driver = nullptr);

}  // namespace qou
