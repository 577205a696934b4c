#include "kepshear/observables.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "kepshear/csv.hpp"
#include "kepshear/errors.hpp"
#include "kepshear/parallel.hpp"

namespace kepshear {

TrigPoly2::TrigPoly2(std::map<Mode, cplx> coeffs) {
  for (const auto& [k, c] : coeffs) add(k.first, k.second, c);
}

TrigPoly2 TrigPoly2::mode(int k1, int k2, cplx c) {
  TrigPoly2 f;
  f.add(k1, k2, c);
  return f;
}

void TrigPoly2::add(int k1, int k2, cplx c) {
  require(std::isfinite(c.real()) && std::isfinite(c.imag()), "TrigPoly2: coefficients must be finite");
  auto& slot = coeffs_[{k1, k2}];
  slot += c;
  if (slot == cplx(0.0)) coeffs_.erase({k1, k2});
}

cplx TrigPoly2::coeff(int k1, int k2) const {
  const auto it = coeffs_.find({k1, k2});
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

int TrigPoly2::radius() const {
  int r = 0;
  for (const auto& [k, c] : coeffs_) r = std::max({r, std::abs(k.first), std::abs(k.second)});
  return r;
}

cplx TrigPoly2::operator()(double x, double y) const {
  cplx acc = 0.0;
  for (const auto& [k, c] : coeffs_) {
    const double ph = 2.0 * std::numbers::pi * frac(k.first * x + k.second * y);
    acc += c * cplx(std::cos(ph), std::sin(ph));
  }
  return acc;
}

TrigPoly2 TrigPoly2::operator+(const TrigPoly2& o) const {
  TrigPoly2 r = *this;
  for (const auto& [k, c] : o.coeffs_) r.add(k.first, k.second, c);
  return r;
}

TrigPoly2 TrigPoly2::operator*(cplx a) const {
  TrigPoly2 r;
  for (const auto& [k, c] : coeffs_) r.add(k.first, k.second, a * c);
  return r;
}

TrigPoly2 TrigPoly2::conj_coeffs() const {
  TrigPoly2 r;
  for (const auto& [k, c] : coeffs_) r.add(k.first, k.second, std::conj(c));
  return r;
}

double hs_norm(const TrigPoly2& f, double s) {
  require(std::isfinite(s) && s >= 0.0, "hs_norm: s must be >= 0");
  double acc = 0.0;
  for (const auto& [k, c] : f.coeffs()) {
    const double k2 = static_cast<double>(k.first) * k.first + static_cast<double>(k.second) * k.second;
    acc += std::norm(c) * std::pow(1.0 + k2, s);
  }
  return std::sqrt(acc);
}

double anisotropic_weight(int k1, int k2) {
  if (k2 == 0) return 1.0;
  const double q = static_cast<double>(k1) / static_cast<double>(k2);
  return std::sqrt(1.0 + q * q);
}

double hs0_norm(const TrigPoly2& f, double s) {
  require(std::isfinite(s) && s >= 0.0, "hs0_norm: s must be >= 0");
  double acc = 0.0;
  for (const auto& [k, c] : f.coeffs()) acc += std::norm(c) * std::pow(anisotropic_weight(k.first, k.second), 2.0 * s);
  return std::sqrt(acc);
}

double cf_constant(const TrigPoly2& f, double s) {
  require(std::isfinite(s) && s >= 0.0, "cf_constant: s must be >= 0");
  double best = 0.0;
  for (const auto& [k, c] : f.coeffs()) {
    const double k2 = static_cast<double>(k.first) * k.first + static_cast<double>(k.second) * k.second;
    best = std::max(best, std::abs(c) * std::pow(1.0 + k2, s / 2.0));
  }
  return best;
}

TrigPoly2 conditional_expectation(const TrigPoly2& f, const Measure1D& base) {
  if (base.kind() == MeasureKind::atomic) throw PreconditionError("invariant algebra exceeds fiber projection");
  require(base.kind() != MeasureKind::empirical, "conditional_expectation: empirical base is atomic");
  TrigPoly2 r;
  for (const auto& [k, c] : f.coeffs())
    if (k.second == 0) r.add(k.first, 0, c);
  return r;
}

cplx inner_product(const TrigPoly2& f, const TrigPoly2& g, const Measure1D& base) {
  cplx acc = 0.0;
  for (const auto& [kf, cf] : f.coeffs())
    for (const auto& [kg, cg] : g.coeffs())
      if (kf.second == kg.second) acc += std::conj(cf) * cg * char_fn(base, kg.first - kf.first);
  return acc;
}

TrigPoly2 random_sobolev_poly(int radius, double s, std::uint64_t seed, double density) {
  require(radius >= 0, "random_sobolev_poly: radius must be >= 0");
  require(density > 0.0 && density <= 1.0, "random_sobolev_poly: density in (0,1]");
  auto rng = chunk_rng(seed, 0x7031, 0);
  TrigPoly2 f;
  for (int k1 = -radius; k1 <= radius; ++k1)
    for (int k2 = -radius; k2 <= radius; ++k2) {
      const double keep = uniform01(rng);
      const double phase = uniform01(rng);
      if ((k1 == 0 && k2 == 0) || keep >= density) continue;
      const double mag = std::pow(1.0 + k1 * k1 + k2 * k2, -s / 2.0 - 0.51);
      f.add(k1, k2, std::polar(mag, 2.0 * std::numbers::pi * phase));
    }
  return f;
}

void write_trigpoly_csv(const TrigPoly2& f, const std::string& path) {
  CsvWriter w(path, {"k1", "k2", "re", "im"});
  for (const auto& [k, c] : f.coeffs()) w.row({std::to_string(k.first), std::to_string(k.second), fmt(c.real()), fmt(c.imag())});
}

TrigPoly2 read_trigpoly_csv(const std::string& path) {
  const auto rows = read_csv(path);
  TrigPoly2 f;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "k1") continue;
    const auto where = path + ":" + std::to_string(i + 1);
    if (r.size() < 3 || r.size() > 4) throw FormatError(where + ": expected k1,k2,re[,im]");
    const double k1 = parse_double(r[0], where), k2 = parse_double(r[1], where);
    if (k1 != std::floor(k1) || k2 != std::floor(k2)) throw FormatError(where + ": modes must be integers");
    f.add(static_cast<int>(k1), static_cast<int>(k2),
          {parse_double(r[2], where), r.size() == 4 ? parse_double(r[3], where) : 0.0});
  }
  return f;
}

}  // namespace kepshear
