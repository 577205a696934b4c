#include "kepshear/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kepshear/errors.hpp"

namespace kepshear {

namespace mp = boost::multiprecision;

namespace {

BigInt floor_of(const Rational& r) {
  const BigInt n = mp::numerator(r), d = mp::denominator(r);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

Rational pow2_neg(unsigned bits) { return Rational(BigInt(1), BigInt(1) << bits); }

BigInt random_bits(std::mt19937_64& rng, unsigned bits) {
  BigInt m = 0;
  for (unsigned got = 0; got < bits; got += 64) m = (m << 64) | BigInt(rng());
  const unsigned extra = (bits + 63) / 64 * 64 - bits;
  return m >> extra;
}

Rational to_rational(double x) {
  require(std::isfinite(x), "non-finite value has no rational form");
  int e = 0;
  const double mant = std::frexp(x, &e);
  const auto m = static_cast<long long>(std::ldexp(mant, 53));
  e -= 53;
  Rational r{BigInt(m)};
  if (e >= 0) r *= Rational(BigInt(1) << e);
  else r /= Rational(BigInt(1) << (-e));
  return r;
}

}  // namespace

RealBracket quadratic_surd(long long a, long long b, long long c, long long d, unsigned bits) {
  require(c > 0 && d != 0, "quadratic_surd: need c > 0 and d != 0");
  const BigInt scaled = BigInt(c) << (2 * bits);
  const BigInt m = mp::sqrt(scaled);
  const Rational unit = pow2_neg(bits);
  Rational slo = Rational(m) * unit, shi = Rational(m + (m * m == scaled ? 0 : 1)) * unit;
  Rational lo = Rational(a) + Rational(b) * (b >= 0 ? slo : shi);
  Rational hi = Rational(a) + Rational(b) * (b >= 0 ? shi : slo);
  lo /= Rational(d);
  hi /= Rational(d);
  if (d < 0) std::swap(lo, hi);
  return {lo, hi};
}

RealBracket golden_ratio(unsigned bits) { return quadratic_surd(1, 1, 5, 2, bits); }

RealBracket liouville_constant(unsigned terms) {
  require(terms >= 1 && terms <= 7, "liouville_constant: terms must lie in [1, 7]");
  Rational sum = 0;
  unsigned long long fact = 1;
  for (unsigned k = 1; k <= terms; ++k) {
    fact *= k;
    sum += Rational(BigInt(1), mp::pow(BigInt(10), static_cast<unsigned>(fact)));
  }
  fact *= terms + 1;
  return {sum, sum + Rational(BigInt(2), mp::pow(BigInt(10), static_cast<unsigned>(fact)))};
}

RealBracket from_double(double x) {
  require(std::isfinite(x), "from_double: value must be finite");
  const Rational r = to_rational(x);
  const Rational half_ulp = (to_rational(std::nextafter(x, std::numeric_limits<double>::infinity())) - r) / 2;
  return {r - half_ulp, r + half_ulp};
}

RealBracket parse_real(const std::string& s, unsigned bits) {
  try {
    if (s == "golden") return golden_ratio(bits);
    if (s.rfind("sqrt:", 0) == 0) {
      const long long c = std::stoll(s.substr(5));
      const auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(c))));
      if (r * r == c) return RealBracket::exact(Rational(r));
      return quadratic_surd(0, 1, c, 1, bits);
    }
    if (s.rfind("liouville:", 0) == 0) return liouville_constant(static_cast<unsigned>(std::stoul(s.substr(10))));
    if (s == "liouville") return liouville_constant(5);
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const BigInt p(s.substr(0, slash)), q(s.substr(slash + 1));
      require(q != 0, "parse_real: zero denominator");
      return RealBracket::exact(Rational(p, q));
    }
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    require(used == s.size(), "parse_real: trailing characters in '" + s + "'");
    return from_double(x);
  } catch (const PreconditionError&) {
    throw;
  } catch (const std::exception&) {
    throw PreconditionError("parse_real: cannot read '" + s + "'");
  }
}

ContinuedFraction cf_expand(const RealBracket& x, std::size_t depth) {
  require(x.lo <= x.hi, "cf_expand: empty bracket");
  require(depth >= 1, "cf_expand: depth must be >= 1");
  ContinuedFraction cf;
  Rational lo = x.lo, hi = x.hi;
  BigInt p_prev = 1, q_prev = 0, p_prev2 = 0, q_prev2 = 1;
  while (cf.a.size() < depth) {
    const BigInt a = floor_of(lo);
    if (a != floor_of(hi)) {
      cf.precision_exhausted = true;
      break;
    }
    const BigInt p = a * p_prev + p_prev2, q = a * q_prev + q_prev2;
    cf.a.push_back(a);
    cf.p.push_back(p);
    cf.q.push_back(q);
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    lo -= a;
    hi -= a;
    if (lo == 0) {
      if (hi == 0) cf.rational = true;
      else cf.precision_exhausted = true;
      break;
    }
    Rational nlo = 1 / hi, nhi = 1 / lo;
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  return cf;
}

double log_big(const BigInt& n) {
  require(n > 0, "log_big: argument must be positive");
  const auto b = static_cast<long>(mp::msb(n));
  if (b < 900) return std::log(n.convert_to<double>());
  const BigInt top = n >> (b - 60);
  return std::log(top.convert_to<double>()) + static_cast<double>(b - 60) * std::log(2.0);
}

std::string to_string(DioVerdict v) { return v == DioVerdict::diverging ? "diverging" : "finite"; }

DioEstimate dio_estimate(const ContinuedFraction& cf) {
  require(cf.depth() >= 5, "dio_estimate: need at least 5 certified quotients (got " + std::to_string(cf.depth()) + ")");
  DioEstimate est;
  est.depth_used = cf.depth();
  est.precision_exhausted = cf.precision_exhausted;
  double record = -1.0;
  for (std::size_t k = 0; k + 1 < cf.depth(); ++k) {
    if (cf.q[k] < 2) continue;
    const double lq = log_big(cf.q[k]);
    est.levels.push_back(k);
    est.s.push_back(log_big(cf.q[k + 1]) / lq);
    const double e = 1.0 + log_big(cf.a[k + 1]) / lq;
    est.exponent.push_back(e);
    if (cf.q[k] >= 10 && e > record) {
      record = e;
      est.records.push_back(e);
    }
  }
  require(!est.levels.empty(), "dio_estimate: no usable levels");
  const std::size_t start = est.levels.size() / 2;
  est.estimate = *std::max_element(est.exponent.begin() + static_cast<std::ptrdiff_t>(start), est.exponent.end());
  int jumps = 0;
  for (std::size_t i = 1; i < est.records.size(); ++i)
    if (est.records[i] - est.records[i - 1] >= 0.75) ++jumps;
  if (!est.records.empty() && (est.records.back() > 10.0 || (jumps >= 2 && est.records.back() >= 4.0)))
    est.verdict = DioVerdict::diverging;
  return est;
}

RealBracket sample_exact(const Measure1D& m, std::uint64_t seed, std::size_t index, unsigned bits) {
  require(bits >= 64, "sample_exact: need at least 64 bits");
  auto rng = chunk_rng(seed, 0xD10, index);
  const Rational unit = pow2_neg(bits);
  switch (m.kind()) {
    case MeasureKind::uniform: {
      const Rational lo = Rational(random_bits(rng, bits)) * unit;
      return {lo, lo + unit};
    }
    case MeasureKind::density: {
      const auto& v = m.as<DensityGrid>().values;
      const double u = uniform01(rng) * static_cast<double>(v.size());
      double acc = 0.0;
      std::size_t j = 0;
      for (; j + 1 < v.size(); ++j) {
        acc += v[j];
        if (u < acc) break;
      }
      const Rational g(static_cast<long long>(v.size()));
      const Rational lo = (Rational(static_cast<long long>(j)) + Rational(random_bits(rng, bits)) * unit) / g;
      return {lo, lo + unit / g};
    }
    case MeasureKind::atomic: {
      const double u = uniform01(rng);
      double acc = 0.0;
      const auto& atoms = m.as<Atomic>().atoms;
      for (const auto& a : atoms) {
        acc += a.weight;
        if (u < acc) return from_double(a.position);
      }
      return from_double(atoms.back().position);
    }
    case MeasureKind::bernoulli: {
      const double th = m.as<BernoulliConvolution>().theta;
      const Rational theta = to_rational(th);
      const auto K = static_cast<std::size_t>(std::ceil((bits * std::log(2.0) - std::log(th - 1.0)) / std::log(th))) + 1;
      Rational power = 1, sum = 0;
      std::uint64_t word = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (k % 64 == 0) word = rng();
        power /= theta;
        if ((word >> (k % 64)) & 1u) sum += power;
        else sum -= power;
      }
      const Rational tail = power / theta / (theta - 1);
      return {sum - tail, sum + tail};
    }
    case MeasureKind::empirical: {
      const auto& s = m.as<Empirical>().samples;
      return from_double(s[std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng)]);
    }
  }
  throw std::logic_error("sample_exact: unknown measure kind");
}

DioCheck rajchman_dio_check(const Measure1D& m, const DecayOrder& r_hat, std::size_t n_samples, std::size_t depth,
                            std::uint64_t seed, double margin, Exec exec) {
  require(n_samples >= 1, "rajchman_dio_check: need at least one sample");
  require(depth >= 5, "rajchman_dio_check: depth must be >= 5");
  DioCheck out;
  out.samples = n_samples;
  out.vacuous = r_hat.at_most(0.0);
  if (!out.vacuous) {
    const double base = (!r_hat.is_infinite() && r_hat.value() <= 0.5) ? 1.0 / r_hat.value() - 1.0 : 1.0;
    out.bound = std::max(base, 1.0) + margin;
  }
  const auto results = indexed_map<std::optional<DioEstimate>>(n_samples, exec, [&](std::size_t i) {
    const auto cf = cf_expand(sample_exact(m, seed, i), depth);
    if (cf.depth() < 5) return std::optional<DioEstimate>{};
    return std::optional<DioEstimate>{dio_estimate(cf)};
  });
  for (const auto& r : results) {
    if (!r) continue;
    ++out.usable;
    if (!out.vacuous && (r->estimate > out.bound || r->verdict == DioVerdict::diverging)) ++out.violations;
    out.estimates.push_back(*r);
  }
  out.violation_fraction = out.usable ? static_cast<double>(out.violations) / static_cast<double>(out.usable) : 0.0;
  return out;
}

}  // namespace kepshear
