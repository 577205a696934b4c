#pragma once

// Expected conditional covariance for the transvection T(x, y) = (x, y + x)
// and the linear flow g_t(x, y) = (x, y + t x) on T^2 with measure mu x Lebesgue.

#include <cstdint>
#include <string>
#include <vector>

#include "kepshear/decay.hpp"
#include "kepshear/measure.hpp"
#include "kepshear/observables.hpp"

namespace kepshear {

enum class TimeKind { discrete, continuous };

struct ShearSystem {
  Measure1D base;
  TimeKind time_kind = TimeKind::discrete;
};

/// Validates the base: discrete systems read the base modulo 1 (so a
/// Bernoulli convolution on R is admitted); continuous systems need it
/// supported in [0, 1).
ShearSystem make_shear_system(Measure1D base, TimeKind kind);

/// E Cov_t(f1, f2 | I) from the finite spectral sum
///   sum_{k2 != 0} conj(f1^(k, k2)) f2^(j, k2) mu^(j - k + t k2).
cplx cov_spectral(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2, double t);

enum class CurveMethod { spectral, monte_carlo };

struct CovCurve {
  std::vector<double> times;
  std::vector<cplx> values;
  CurveMethod method = CurveMethod::spectral;
  std::vector<double> stderrs;  // empty for spectral curves
};

/// Spectral curve. Pairs of modes are first collapsed to lag coefficients
/// C(d, k2) so each time costs one transform evaluation per lag.
CovCurve cov_curve_spectral(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2,
                            const std::vector<double>& times, Exec exec = Exec::parallel);

/// Monte-Carlo estimate of the same quantity from (x, y) ~ mu x Lebesgue.
Estimate cov_monte_carlo(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2, double t,
                         std::size_t n_samples, std::uint64_t seed, Exec exec = Exec::parallel);

/// Monte-Carlo curve with one sample set shared by all times.
CovCurve cov_curve_monte_carlo(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2,
                               const std::vector<double>& times, std::size_t n_samples, std::uint64_t seed,
                               Exec exec = Exec::parallel);

/// Envelope fit of |values| against time. Needs at least 16 positive times.
DecayEstimate decay_fit(const CovCurve& curve, std::size_t blocks = 16);

enum class Verdict { pass, fail_lower, fail_upper, not_applicable };
std::string to_string(Verdict v);

struct BoundCheck {
  Verdict verdict = Verdict::not_applicable;
  double lower = 0.0;
  double upper = 0.0;  // meaningless when upper_active is false
  bool upper_active = false;
  double tol = 0.15;
};

/// PASS iff min{s/2 - 1, r} - tol <= gamma <= r + tol; +inf r drops the upper
/// bound; s <= 2 is outside the hypothesis and reports not_applicable.
BoundCheck bound_check(double gamma_hat, double s, const DecayOrder& r_hat, double tol = 0.15);
/// Same, for a fitted order that may be +inf (clears every lower bound).
BoundCheck bound_check(const DecayOrder& gamma_hat, double s, const DecayOrder& r_hat, double tol = 0.15);

/// Geometric times t_min * ratio^k up to t_max (rounded and de-duplicated when
/// `integers`).
std::vector<double> geometric_times(double t_min, double t_max, double ratio, bool integers);

void write_curve_csv(const CovCurve& c, const std::string& path);
CovCurve read_curve_csv(const std::string& path);

}  // namespace kepshear
