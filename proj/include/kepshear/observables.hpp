#pragma once

// Finite trigonometric polynomials on T^2 and their Sobolev data.

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "kepshear/measure.hpp"
#include "kepshear/stats.hpp"

namespace kepshear {

using Mode = std::pair<int, int>;

/// f(x, y) = sum_k c_k exp(2 i pi (k1 x + k2 y)) with finitely many nonzero c_k.
class TrigPoly2 {
 public:
  TrigPoly2() = default;
  explicit TrigPoly2(std::map<Mode, cplx> coeffs);

  static TrigPoly2 mode(int k1, int k2, cplx c = 1.0);

  /// Adds c to the coefficient of (k1, k2); exact zeros are dropped.
  void add(int k1, int k2, cplx c);
  cplx coeff(int k1, int k2) const;
  const std::map<Mode, cplx>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  /// max(|k1|, |k2|) over the support (0 when empty).
  int radius() const;

  cplx operator()(double x, double y) const;

  TrigPoly2 operator+(const TrigPoly2& o) const;
  TrigPoly2 operator*(cplx a) const;
  TrigPoly2 conj_coeffs() const;

 private:
  std::map<Mode, cplx> coeffs_;
};

/// (sum |c_k|^2 (1 + |k|^2)^s)^{1/2}.
double hs_norm(const TrigPoly2& f, double s);

/// Anisotropic weight h(k) = sqrt(1 + k1^2 / k2^2) for k2 != 0, 1 otherwise.
double anisotropic_weight(int k1, int k2);

/// (sum |c_k|^2 h(k)^{2s})^{1/2}.
double hs0_norm(const TrigPoly2& f, double s);

/// max |c_k| (1 + |k|^2)^{s/2}; 0 for the zero polynomial.
double cf_constant(const TrigPoly2& f, double s);

/// Projection onto the invariant algebra of the transvection / linear flow:
/// keeps the modes with k2 = 0. Needs a nonatomic base.
TrigPoly2 conditional_expectation(const TrigPoly2& f, const Measure1D& base);

/// <f, g> = integral of conj(f) g d(mu x Lebesgue), summed spectrally.
cplx inner_product(const TrigPoly2& f, const TrigPoly2& g, const Measure1D& base);

/// Random polynomial on the square |k1|, |k2| <= radius with
/// |c_k| = (1 + |k|^2)^{-s/2 - 0.51} and uniform phases. Modes are kept with
/// probability `density` (the origin is never kept).
TrigPoly2 random_sobolev_poly(int radius, double s, std::uint64_t seed, double density = 1.0);

/// CSV rows k1,k2,re,im (header line "k1,k2,re,im").
void write_trigpoly_csv(const TrigPoly2& f, const std::string& path);
TrigPoly2 read_trigpoly_csv(const std::string& path);

}  // namespace kepshear
