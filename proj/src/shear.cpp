#include "kepshear/shear.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kepshear/csv.hpp"
#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

struct Lag {
  int d;   // j - k
  int k2;  // fiber frequency
  cplx c;
};

// Collapses sum over mode pairs to sum over (d, k2) lags.
std::vector<Lag> lag_coefficients(const TrigPoly2& f1, const TrigPoly2& f2) {
  std::map<std::pair<int, int>, cplx> acc;
  for (const auto& [a, ca] : f1.coeffs()) {
    if (a.second == 0) continue;
    for (const auto& [b, cb] : f2.coeffs())
      if (b.second == a.second) acc[{b.first - a.first, a.second}] += std::conj(ca) * cb;
  }
  std::vector<Lag> lags;
  for (const auto& [k, c] : acc)
    if (c != cplx(0.0)) lags.push_back({k.first, k.second, c});
  return lags;
}

void check_time(const ShearSystem& sys, double t) {
  require(std::isfinite(t), "shear: time must be finite");
  if (sys.time_kind == TimeKind::discrete)
    require(t >= 0.0 && std::floor(t) == t, "shear: discrete time must be a nonnegative integer");
}

std::vector<double> base_samples(const ShearSystem& sys, std::size_t n, std::uint64_t seed, Exec exec) {
  return sample(sys.base, seed, n, exec);
}

}  // namespace

ShearSystem make_shear_system(Measure1D base, TimeKind kind) {
  if (kind == TimeKind::continuous)
    require(base.supported_in_unit_interval(), "continuous shear: base measure must be supported in [0,1)");
  return ShearSystem{std::move(base), kind};
}

cplx cov_spectral(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2, double t) {
  check_time(sys, t);
  cplx acc = 0.0;
  for (const auto& l : lag_coefficients(f1, f2)) acc += l.c * char_fn(sys.base, l.d + t * l.k2);
  return acc;
}

CovCurve cov_curve_spectral(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2,
                            const std::vector<double>& times, Exec exec) {
  for (double t : times) check_time(sys, t);
  const auto lags = lag_coefficients(f1, f2);
  CovCurve curve;
  curve.times = times;
  curve.method = CurveMethod::spectral;
  curve.values.assign(times.size(), 0.0);
  for (const auto& l : lags) {
    std::vector<double> args(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) args[i] = l.d + times[i] * l.k2;
    const auto mu = char_fn_batch(sys.base, args, exec);
    for (std::size_t i = 0; i < times.size(); ++i) curve.values[i] += l.c * mu[i];
  }
  return curve;
}

CovCurve cov_curve_monte_carlo(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2,
                               const std::vector<double>& times, std::size_t n_samples, std::uint64_t seed,
                               Exec exec) {
  require(n_samples >= 2, "cov_monte_carlo: need at least 2 samples");
  for (double t : times) check_time(sys, t);
  const auto e1 = conditional_expectation(f1, sys.base);
  const auto e2 = conditional_expectation(f2, sys.base);
  const auto xs = base_samples(sys, n_samples, seed, exec);

  const auto parts = indexed_map<std::vector<ComplexMoments>>(chunk_count(n_samples), exec, [&](std::size_t c) {
    std::vector<ComplexMoments> m(times.size());
    const auto r = chunk_range(n_samples, c);
    auto rng = chunk_rng(seed, 0xF1BE, c);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const double x = xs[i];
      const double y = uniform01(rng);
      const cplx a = std::conj(f1(x, y));
      const cplx inv = std::conj(e1(x, 0.0)) * e2(x, 0.0);
      for (std::size_t k = 0; k < times.size(); ++k) m[k].add(a * f2(x, frac(y + frac(times[k] * x))) - inv);
    }
    return m;
  });

  CovCurve curve;
  curve.times = times;
  curve.method = CurveMethod::monte_carlo;
  for (std::size_t k = 0; k < times.size(); ++k) {
    ComplexMoments acc;
    for (const auto& p : parts) acc.merge(p[k]);
    const auto est = acc.estimate();
    curve.values.push_back(est.value);
    curve.stderrs.push_back(est.stderr());
  }
  return curve;
}

Estimate cov_monte_carlo(const ShearSystem& sys, const TrigPoly2& f1, const TrigPoly2& f2, double t,
                         std::size_t n_samples, std::uint64_t seed, Exec exec) {
  const auto c = cov_curve_monte_carlo(sys, f1, f2, {t}, n_samples, seed, exec);
  return {c.values[0], c.stderrs[0], n_samples};
}

DecayEstimate decay_fit(const CovCurve& curve, std::size_t blocks) {
  require(curve.times.size() == curve.values.size(), "decay_fit: times/values length mismatch");
  std::vector<double> t, mag;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] <= 0.0) continue;
    t.push_back(curve.times[i]);
    mag.push_back(std::abs(curve.values[i]));
  }
  require(t.size() >= 16, "decay_fit: need at least 16 positive time points");
  return fit_envelope(t, mag, blocks);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail_lower:
      return "FAIL_LOWER";
    case Verdict::fail_upper:
      return "FAIL_UPPER";
    case Verdict::not_applicable:
      return "NOT_APPLICABLE";
  }
  return "?";
}

BoundCheck bound_check(double gamma_hat, double s, const DecayOrder& r_hat, double tol) {
  require(std::isfinite(gamma_hat) && gamma_hat >= 0.0, "bound_check: gamma must be finite and >= 0");
  require(std::isfinite(s), "bound_check: s must be finite");
  BoundCheck b;
  b.tol = tol;
  if (s <= 2.0) return b;
  b.lower = r_hat.min_with(s / 2.0 - 1.0);
  b.upper_active = !r_hat.is_infinite();
  if (b.upper_active) b.upper = r_hat.value();
  if (gamma_hat < b.lower - tol) b.verdict = Verdict::fail_lower;
  else if (b.upper_active && gamma_hat > b.upper + tol) b.verdict = Verdict::fail_upper;
  else b.verdict = Verdict::pass;
  return b;
}

BoundCheck bound_check(const DecayOrder& gamma_hat, double s, const DecayOrder& r_hat, double tol) {
  if (!gamma_hat.is_infinite()) return bound_check(gamma_hat.value(), s, r_hat, tol);
  auto b = bound_check(0.0, s, r_hat, tol);
  if (b.verdict != Verdict::not_applicable) b.verdict = b.upper_active ? Verdict::fail_upper : Verdict::pass;
  return b;
}

std::vector<double> geometric_times(double t_min, double t_max, double ratio, bool integers) {
  require(t_min > 0.0 && t_min <= t_max && ratio > 1.0, "geometric_times: need 0 < t_min <= t_max, ratio > 1");
  std::vector<double> out;
  for (double t = t_min; t <= t_max * (1.0 + 1e-12); t *= ratio) out.push_back(integers ? std::round(t) : t);
  if (integers) out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_curve_csv(const CovCurve& c, const std::string& path) {
  CsvWriter w(path, {"t", "re", "im", "stderr"});
  for (std::size_t i = 0; i < c.times.size(); ++i)
    w.row({fmt(c.times[i]), fmt(c.values[i].real()), fmt(c.values[i].imag()), c.stderrs.empty() ? "" : fmt(c.stderrs[i])});
}

CovCurve read_curve_csv(const std::string& path) {
  const auto rows = read_csv(path);
  CovCurve c;
  bool any_stderr = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "t") continue;
    const auto where = path + ":" + std::to_string(i + 1);
    if (r.size() < 2) throw FormatError(where + ": expected t,re[,im[,stderr]]");
    c.times.push_back(parse_double(r[0], where));
    c.values.emplace_back(parse_double(r[1], where), r.size() > 2 && !r[2].empty() ? parse_double(r[2], where) : 0.0);
    const bool has = r.size() > 3 && !r[3].empty();
    any_stderr = any_stderr || has;
    c.stderrs.push_back(has ? parse_double(r[3], where) : 0.0);
  }
  if (any_stderr) c.method = CurveMethod::monte_carlo;
  else c.stderrs.clear();
  return c;
}

}  // namespace kepshear
