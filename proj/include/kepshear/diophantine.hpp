#pragma once

// Continued fractions of certified real brackets and Diophantine exponents.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kepshear/decay.hpp"
#include "kepshear/measure.hpp"

namespace kepshear {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A real number known to lie in [lo, hi] (lo == hi for exact rationals).
struct RealBracket {
  Rational lo;
  Rational hi;

  static RealBracket exact(const Rational& r) { return {r, r}; }
  bool is_exact() const { return lo == hi; }
  Rational mid() const { return (lo + hi) / 2; }
};

/// (a + b sqrt(c)) / d to within 2^-bits (c > 0 not a perfect square, d != 0).
RealBracket quadratic_surd(long long a, long long b, long long c, long long d, unsigned bits = 512);
RealBracket golden_ratio(unsigned bits = 512);
/// sum_{k=1}^{terms} 10^{-k!} with the tail bound 2 * 10^{-(terms+1)!}.
RealBracket liouville_constant(unsigned terms);
/// The double plus or minus half an ulp.
RealBracket from_double(double x);
/// "p/q", "sqrt:c", "golden", "liouville:terms", or a decimal (read as a
/// double, bracketed by half an ulp).
RealBracket parse_real(const std::string& s, unsigned bits = 512);

struct ContinuedFraction {
  std::vector<BigInt> a;  // a0; a1, a2, ...
  std::vector<BigInt> p;  // convergent numerators
  std::vector<BigInt> q;  // convergent denominators
  bool precision_exhausted = false;
  bool rational = false;

  std::size_t depth() const { return a.size(); }
};

/// Gauss-map expansion of every real in the bracket at once: quotients are
/// emitted while both endpoints agree, so every emitted quotient is
/// certified. Stops at `depth` quotients, at an exact rational end, or with
/// precision_exhausted when the endpoints disagree.
ContinuedFraction cf_expand(const RealBracket& x, std::size_t depth);

/// log of a positive big integer.
double log_big(const BigInt& n);

enum class DioVerdict { finite, diverging };
std::string to_string(DioVerdict v);

struct DioEstimate {
  /// Levels k (q_k >= 2, a_{k+1} known) in increasing order.
  std::vector<std::size_t> levels;
  /// s_k = log q_{k+1} / log q_k.
  std::vector<double> s;
  /// e_k = 1 + log a_{k+1} / log q_k, the exponent with |q_k x - p_k| ~ q_k^{-e_k}.
  std::vector<double> exponent;
  /// max of exponent over the deepest half of the levels.
  double estimate = 1.0;
  /// Successive maxima of exponent over levels with q_k >= 10.
  std::vector<double> records;
  std::size_t depth_used = 0;
  bool precision_exhausted = false;
  DioVerdict verdict = DioVerdict::finite;
};

/// Needs at least 5 quotients. Diverging when an exponent record exceeds 10,
/// or when the records grow at least twice by >= 0.75 and end at >= 4.
DioEstimate dio_estimate(const ContinuedFraction& cf);

/// Exact sample of `m`: Bernoulli draws are finite sign sums (theta read as
/// the exact binary value of the double) with the tail below 2^-bits folded
/// into the bracket; uniform and density draws carry `bits` random bits.
RealBracket sample_exact(const Measure1D& m, std::uint64_t seed, std::size_t index, unsigned bits = 256);

struct DioCheck {
  double bound = 0.0;  // max(1/r - 1, 1) + margin
  bool vacuous = false;  // r = 0
  std::size_t samples = 0;
  std::size_t usable = 0;  // expansions with at least 5 certified quotients
  std::size_t violations = 0;
  double violation_fraction = 0.0;  // violations / usable
  std::vector<DioEstimate> estimates;
};

/// Samples alpha ~ m and counts Dio(alpha) > bound; diverging expansions
/// always count.
DioCheck rajchman_dio_check(const Measure1D& m, const DecayOrder& r_hat, std::size_t n_samples, std::size_t depth,
                            std::uint64_t seed, double margin = 0.5, Exec exec = Exec::parallel);

}  // namespace kepshear
