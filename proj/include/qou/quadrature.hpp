#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qou/errors.hpp"

namespace qou {

struct QuadOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-9;
  std::size_t max_panels = 4000;
  bool throw_on_failure = true;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (G7,K15) on [a,b]. Extra breakpoints fence
// off known kinks/singular points before refinement starts.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {},
                     std::span<const double> breakpoints = {});

// int_a^b (s-a)^p g(s) ds for p in (-1,0): substituting w = (s-a)^(1+p) removes
// the endpoint singularity exactly; g must be bounded near a.
QuadResult integrate_power_left(const Integrand& g, double p, double a, double b,
                                const QuadOptions& opts = {});

// int_S^inf s^q g(s) ds for q < -1 and g bounded with a limit at infinity
// (substitution s = S/v maps the tail onto (0,1]).
QuadResult integrate_tail_power(const Integrand& g, double q, double S,
                                const QuadOptions& opts = {});

// int_a^inf f for integrands with (at least) exponential-type decay,
// via s = a + v/(1-v).
QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadOptions& opts = {});

}  // namespace qou
