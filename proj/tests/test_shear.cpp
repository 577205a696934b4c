#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kepshear/errors.hpp"
#include "kepshear/shear.hpp"
#include "oracles.hpp"

using namespace kepshear;

namespace {

Measure1D cos_density(std::size_t cells) {
  return Measure1D::density_from([](double x) { return 1 + std::cos(2 * std::numbers::pi * x); }, cells);
}

}  // namespace

TEST_CASE("single mode covariance is the base transform") {
  const auto f = TrigPoly2::mode(1, 1);
  for (const auto& m : {Measure1D::uniform(), cos_density(64), Measure1D::atomic({{0.2, 0.4}, {0.55, 0.6}}),
                        Measure1D::bernoulli(2.5)}) {
    const auto sys = make_shear_system(m, TimeKind::discrete);
    for (int n : {0, 1, 2, 7, 100, 4321}) CHECK(std::abs(cov_spectral(sys, f, f, n) - char_fn(m, n)) < 1e-14);
  }
}

TEST_CASE("spectral sum matches tensor quadrature") {
  std::mt19937_64 rng(21);
  const auto dens = cos_density(32);
  const std::vector<Atom> atoms{{0.1234567, 0.35}, {0.7654321, 0.65}};
  for (int i = 0; i < 10; ++i) {
    const auto f1 = oracle::random_poly(rng, 3), f2 = oracle::random_poly(rng, 3);
    const int n = i % 6;
    const auto su = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
    CHECK(std::abs(cov_spectral(su, f1, f2, n) - oracle::cov_quadrature(oracle::uniform_rule(128), 64, f1, f2, n)) < 1e-9);
    const auto sd = make_shear_system(dens, TimeKind::discrete);
    CHECK(std::abs(cov_spectral(sd, f1, f2, n) -
                   oracle::cov_quadrature(oracle::density_rule(dens.as<DensityGrid>().values, 16), 64, f1, f2, n)) < 1e-9);
    const auto sa = make_shear_system(Measure1D::atomic(atoms), TimeKind::discrete);
    CHECK(std::abs(cov_spectral(sa, f1, f2, n) - oracle::cov_quadrature(oracle::atomic_rule(atoms), 64, f1, f2, n)) < 1e-9);
  }
}

TEST_CASE("Lebesgue base: covariance vanishes once n exceeds twice the support radius") {
  std::mt19937_64 rng(4);
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  for (int i = 0; i < 10; ++i) {
    const auto f = oracle::random_poly(rng, 4, 0.8);
    for (int n = 9; n < 40; ++n) CHECK(cov_spectral(sys, f, f, n) == cplx(0));
  }
  const auto g = TrigPoly2::mode(1, 1) + TrigPoly2::mode(0, 1);
  const auto q = oracle::cov_quadrature(oracle::uniform_rule(512), 512, g, g, 1);
  CHECK(std::abs(cov_spectral(sys, g, g, 1) - q) < 1e-12);
  CHECK(std::abs(q - cplx(1.0)) < 1e-12);
}

TEST_CASE("Hermitian symmetry, linearity and antilinearity") {
  std::mt19937_64 rng(6);
  const auto sys = make_shear_system(cos_density(64), TimeKind::continuous);
  std::uniform_real_distribution<double> ut(-30, 30);
  for (int i = 0; i < 10; ++i) {
    const auto f1 = oracle::random_poly(rng, 3), f2 = oracle::random_poly(rng, 3), f3 = oracle::random_poly(rng, 3);
    const double t = ut(rng);
    CHECK(std::abs(cov_spectral(sys, f1, f2, t) - std::conj(cov_spectral(sys, f2, f1, -t))) < 1e-12);
    const cplx a(0.3, -1.2);
    const cplx lin = cov_spectral(sys, f1, f2 * a + f3, t) - (a * cov_spectral(sys, f1, f2, t) + cov_spectral(sys, f1, f3, t));
    const cplx anti = cov_spectral(sys, f1 * a, f2, t) - std::conj(a) * cov_spectral(sys, f1, f2, t);
    CHECK(std::abs(lin) < 1e-12);
    CHECK(std::abs(anti) < 1e-12);
  }
}

TEST_CASE("system validation") {
  CHECK_THROWS_AS(make_shear_system(Measure1D::bernoulli(2.5), TimeKind::continuous), PreconditionError);
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  CHECK_THROWS_AS(cov_spectral(sys, TrigPoly2::mode(1, 1), TrigPoly2::mode(1, 1), 1.5), PreconditionError);
  CHECK_THROWS_AS(cov_spectral(sys, TrigPoly2::mode(1, 1), TrigPoly2::mode(1, 1), -1), PreconditionError);
}

TEST_CASE("Monte-Carlo covariance agrees with the spectral sum") {
  std::mt19937_64 rng(31);
  int outside = 0, total = 0;
  for (int i = 0; i < 50; ++i) {
    const auto base = (i % 2) ? Measure1D::uniform() : cos_density(64);
    const auto sys = make_shear_system(base, TimeKind::discrete);
    const auto f1 = oracle::random_poly(rng, 2, 0.5), f2 = oracle::random_poly(rng, 2, 0.5);
    const int n = static_cast<int>(rng() % 5);
    const auto mc = cov_monte_carlo(sys, f1, f2, n, 20000, 1000 + i);
    ++total;
    if (std::abs(mc.value - cov_spectral(sys, f1, f2, n)) > 3 * std::sqrt(2.0) * mc.stderr()) ++outside;
  }
  // Complex 3-sigma disc: a few excursions are expected among 50 draws.
  CHECK(outside <= 3);
}

TEST_CASE("Monte-Carlo trivial cases") {
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  const auto inv = TrigPoly2::mode(2, 0) + TrigPoly2::mode(-1, 0, 0.5);
  const auto g = TrigPoly2::mode(1, 1) + TrigPoly2::mode(0, 2);
  const auto z = cov_monte_carlo(sys, inv, g, 3, 50000, 2);
  CHECK(std::abs(z.value) < 3 * z.stderr() + 1e-12);
  const auto one = cov_monte_carlo(sys, TrigPoly2::mode(0, 1), TrigPoly2::mode(0, 1), 0, 10000, 2);
  CHECK(std::abs(one.value - 1.0) < 1e-12);
  CHECK_THROWS_AS(cov_monte_carlo(make_shear_system(Measure1D::atomic({{0.5, 1}}), TimeKind::discrete), g, g, 1, 100, 1),
                  PreconditionError);
}

TEST_CASE("curves: serial and parallel are bit-identical") {
  std::mt19937_64 rng(3);
  const auto sys = make_shear_system(cos_density(128), TimeKind::discrete);
  const auto f1 = oracle::random_poly(rng, 3), f2 = oracle::random_poly(rng, 3);
  const auto ts = geometric_times(1, 1e4, 1.25, true);
  CHECK(cov_curve_spectral(sys, f1, f2, ts, Exec::serial).values == cov_curve_spectral(sys, f1, f2, ts, Exec::parallel).values);
  const auto a = cov_curve_monte_carlo(sys, f1, f2, {0, 1, 2}, 10000, 4, Exec::serial);
  const auto b = cov_curve_monte_carlo(sys, f1, f2, {0, 1, 2}, 10000, 4, Exec::parallel);
  CHECK(a.values == b.values);
  CHECK(a.stderrs == b.stderrs);
}

TEST_CASE("decay fits of covariance curves") {
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  std::vector<double> ts;
  for (int n = 1; n <= 64; ++n) ts.push_back(n);
  const auto f = random_sobolev_poly(4, 3.0, 1);
  CHECK(decay_fit(cov_curve_spectral(sys, f, f, ts)).order.is_infinite());

  CovCurve flat;
  for (int i = 1; i <= 20; ++i) {
    flat.times.push_back(i);
    flat.values.push_back(0.7);
  }
  CHECK(decay_fit(flat).order.value() == doctest::Approx(0.0));
  flat.times.resize(10);
  flat.values.resize(10);
  CHECK_THROWS_AS(decay_fit(flat), PreconditionError);
}

TEST_CASE("bound check verdicts") {
  CHECK(bound_check(0.20, 4, DecayOrder::finite(0.22)).verdict == Verdict::pass);
  CHECK(bound_check(0.9, 4, DecayOrder::finite(0.22)).verdict == Verdict::fail_upper);
  CHECK(bound_check(0.01, 4, DecayOrder::finite(0.5)).verdict == Verdict::fail_lower);
  CHECK(bound_check(6 - 1e-3, 3, DecayOrder::infinite()).verdict == Verdict::pass);
  CHECK(bound_check(0.3, 2, DecayOrder::finite(0.3)).verdict == Verdict::not_applicable);
  const auto b = bound_check(0.3, 3, DecayOrder::finite(0.9));
  CHECK(b.lower == doctest::Approx(0.5));
  CHECK(b.upper == doctest::Approx(0.9));
}

TEST_CASE("geometric grids and curve CSV") {
  const auto ts = geometric_times(1, 1e4, 1.25, false);
  CHECK(ts.size() == 42);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] / ts[i - 1] == doctest::Approx(1.25));
  const auto is = geometric_times(1, 1e4, 1.25, true);
  for (std::size_t i = 1; i < is.size(); ++i) CHECK(is[i] > is[i - 1]);

  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  const auto c = cov_curve_monte_carlo(sys, TrigPoly2::mode(1, 1), TrigPoly2::mode(1, 1), {0, 1, 2}, 1000, 1);
  write_curve_csv(c, "curve_roundtrip.csv");
  const auto r = read_curve_csv("curve_roundtrip.csv");
  CHECK(r.values == c.values);
  CHECK(r.stderrs == c.stderrs);
  CHECK(r.method == CurveMethod::monte_carlo);
  std::remove("curve_roundtrip.csv");
}

TEST_CASE("bound check with an infinite fitted order") {
  CHECK(bound_check(DecayOrder::infinite(), 3, DecayOrder::infinite()).verdict == Verdict::pass);
  CHECK(bound_check(DecayOrder::infinite(), 3, DecayOrder::finite(0.3)).verdict == Verdict::fail_upper);
  CHECK(bound_check(DecayOrder::infinite(), 2, DecayOrder::finite(0.3)).verdict == Verdict::not_applicable);
  CHECK(bound_check(DecayOrder::finite(0.2), 4, DecayOrder::finite(0.22)).verdict == Verdict::pass);
  CHECK(to_string(Verdict::fail_lower) == "FAIL_LOWER");
}

TEST_CASE("Lebesgue base: anisotropic Cauchy-Schwarz bound") {
  // A nonzero lag j - k = -n k2 forces |k1| or |j1| >= n |k2| / 2, so one
  // anisotropic weight is >= n / 2: |E Cov_n| <= 2 (2/n)^s |f1|_{s,0} |f2|_{s,0}.
  std::mt19937_64 rng(12);
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  for (double s : {1.0, 2.0, 3.0}) {
    for (int i = 0; i < 20; ++i) {
      const auto f1 = oracle::random_poly(rng, 6), f2 = oracle::random_poly(rng, 6);
      const double scale = hs0_norm(f1, s) * hs0_norm(f2, s);
      for (int n = 1; n <= 16; ++n) CHECK(std::abs(cov_spectral(sys, f1, f2, n)) <= 2 * std::pow(2.0 / n, s) * scale + 1e-14);
    }
  }
  // The single-pair configuration attains the n^-s rate.
  for (int n = 1; n <= 12; ++n) {
    const auto f1 = TrigPoly2::mode(n, 1), f2 = TrigPoly2::mode(0, 1);
    const double s = 3;
    const double v = std::abs(cov_spectral(sys, f1, f2, n)) / (hs0_norm(f1, s) * hs0_norm(f2, s));
    CHECK(v == doctest::Approx(std::pow(1.0 + n * n, -s / 2)));
  }
}
