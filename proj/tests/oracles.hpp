#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "kepshear/filon.hpp"
#include "kepshear/measure.hpp"
#include "kepshear/observables.hpp"

namespace oracle {

using kepshear::cplx;

/// J0(z) from its power series in 200-digit decimal arithmetic (the terms
/// reach e^z before cancelling, so doubles are useless past z ~ 30).
inline double bessel_j0(double z) {
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<200>>;
  const Big h = Big(z) / 2, h2 = h * h;
  Big term = 1, sum = 1;
  for (int m = 1; m < 4000; ++m) {
    term *= -h2 / (Big(m) * Big(m));
    sum += term;
    if (m > h && abs(term) < Big("1e-40")) break;
  }
  return sum.convert_to<double>();
}

/// Random polynomial with support in [-R, R]^2 and Gaussian coefficients.
inline kepshear::TrigPoly2 random_poly(std::mt19937_64& rng, int R, double keep = 0.4) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  kepshear::TrigPoly2 f;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b)
      if (u(rng) < keep) f.add(a, b, {g(rng), g(rng)});
  if (f.empty()) f.add(1, 1, 1.0);
  return f;
}

/// Quadrature nodes/weights in x for a base measure, exact for the
/// trigonometric degrees used by the tests.
struct XRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline XRule uniform_rule(int n) {
  XRule r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back((i + 0.5) / n);
    r.w.push_back(1.0 / n);
  }
  return r;
}

/// Gauss-Legendre nodes inside every cell of a density grid, weighted by the cell value.
inline XRule density_rule(const std::vector<double>& values, int per_cell) {
  const auto& gl = kepshear::gauss_legendre(per_cell);
  const double G = static_cast<double>(values.size());
  XRule r;
  for (std::size_t j = 0; j < values.size(); ++j)
    for (int k = 0; k < per_cell; ++k) {
      r.x.push_back((j + 0.5 + 0.5 * gl.nodes[k]) / G);
      r.w.push_back(values[j] * 0.5 * gl.weights[k] / G);
    }
  return r;
}

inline XRule atomic_rule(const std::vector<kepshear::Atom>& atoms) {
  XRule r;
  for (const auto& a : atoms) {
    r.x.push_back(a.position);
    r.w.push_back(a.weight);
  }
  return r;
}

inline cplx cis(double cycles) {
  const double f = cycles - std::floor(cycles);
  return {std::cos(2 * std::numbers::pi * f), std::sin(2 * std::numbers::pi * f)};
}

/// E Cov_t = integral conj(f1) f2(x, y + t x) - integral conj(fiber mean f1) fiber mean f2,
/// by tensor quadrature with `ny` uniform y nodes. Evaluation is separable:
/// f(x, y) = sum_{k2} g_x(k2) e(k2 y).
inline cplx cov_quadrature(const XRule& xr, int ny, const kepshear::TrigPoly2& f1, const kepshear::TrigPoly2& f2,
                           double t) {
  int R = std::max(f1.radius(), f2.radius());
  const int W = 2 * R + 1;
  std::vector<cplx> ey(static_cast<std::size_t>(ny) * W);
  for (int j = 0; j < ny; ++j)
    for (int k2 = -R; k2 <= R; ++k2) ey[static_cast<std::size_t>(j) * W + (k2 + R)] = cis(k2 * (double(j) / ny));
  cplx total = 0.0, fiber = 0.0;
  std::vector<cplx> g1(W), g2(W);
  for (std::size_t a = 0; a < xr.x.size(); ++a) {
    const double x = xr.x[a];
    std::fill(g1.begin(), g1.end(), 0.0);
    std::fill(g2.begin(), g2.end(), 0.0);
    for (const auto& [k, c] : f1.coeffs()) g1[k.second + R] += c * cis(k.first * x);
    for (const auto& [k, c] : f2.coeffs()) g2[k.second + R] += c * cis(k.first * x + k.second * t * x);
    cplx inner = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < ny; ++j) {
      cplx v1 = 0.0, v2 = 0.0;
      for (int q = 0; q < W; ++q) {
        v1 += g1[q] * ey[static_cast<std::size_t>(j) * W + q];
        v2 += g2[q] * ey[static_cast<std::size_t>(j) * W + q];
      }
      inner += std::conj(v1) * v2;
      m1 += v1;
      m2 += v2;
    }
    inner /= double(ny);
    m1 /= double(ny);
    m2 /= double(ny);
    total += xr.w[a] * inner;
    fiber += xr.w[a] * std::conj(m1) * m2;
  }
  return total - fiber;
}

}  // namespace oracle
