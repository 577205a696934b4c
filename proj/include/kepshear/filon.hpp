#pragma once

// Quadrature of oscillatory integrals  integral_a^b amp(x) exp(2 i pi p(x)) dx
// where the phase p is given in cycles.

#include <functional>
#include <vector>

#include "kepshear/parallel.hpp"
#include "kepshear/stats.hpp"

namespace kepshear {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

struct Oscillatory {
  std::function<double(double)> phase;  // cycles
  std::function<double(double)> amp;    // empty means 1
  double a = 0.0;
  double b = 1.0;
  /// Points where amp or phase lose smoothness; always panel edges.
  std::vector<double> breaks;
};

struct FilonOptions {
  /// Accepted deviation of the quadratic phase model (radians) and of the
  /// quadratic amplitude model (relative to max |amp|) at the quarter points.
  double tol = 1e-9;
  std::size_t initial_panels = 32;
  std::size_t panel_budget = 2'000'000;
};

struct QuadResult {
  cplx value;
  std::size_t panels = 0;
};

/// Adaptive Filon-type rule: on each panel the phase and amplitude are
/// replaced by quadratics through the end and mid points and integrated
/// analytically through the moments of exp(i B s) on [-1, 1]. Panels whose
/// total phase excursion is small are integrated directly with 64-point
/// Gauss-Legendre. Throws BudgetError past `panel_budget` panels.
QuadResult filon_integrate(const Oscillatory& f, const FilonOptions& opt = {});

/// Composite 10-point Gauss-Legendre with `panels` equal panels per smooth
/// piece, reduced in panel order. Throws BudgetError past `budget` panels.
QuadResult dense_integrate(const Oscillatory& f, std::size_t panels, std::size_t budget = 2'000'000,
                           Exec exec = Exec::parallel);

/// m_k = integral_{-1}^{1} s^k exp(i B s) ds for k = 0..kmax (forward
/// recursion; accurate for kmax < |B|).
std::vector<cplx> exp_moments(double B, int kmax);

}  // namespace kepshear
