#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "kepshear/errors.hpp"
#include "kepshear/phase.hpp"
#include "oracles.hpp"

using namespace kepshear;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::vector<double> fit_grid() {
  EnvelopeGrid g;
  g.t_min = 10;
  g.t_max = 1e4;
  g.blocks = 12;
  g.per_block = 16;
  return envelope_points(g);
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 10, 64}) {
    const auto& r = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(acc == doctest::Approx(k % 2 ? 0.0 : 2.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), PreconditionError);
}

TEST_CASE("exp moments agree with direct quadrature") {
  const auto& gl = gauss_legendre(200);
  for (double B : {45.0, 120.0, -300.0}) {
    const auto m = exp_moments(B, 8);
    for (int k = 0; k <= 8; ++k) {
      cplx ref = 0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double s = gl.nodes[i];
        ref += gl.weights[i] * std::pow(s, k) * cplx(std::cos(B * s), std::sin(B * s));
      }
      CHECK(std::abs(m[k] - ref) < 1e-12);
    }
  }
}

TEST_CASE("Taylor derivatives of a known function") {
  const auto d = taylor_derivatives([](double x) { return std::sin(kTwoPi * x); }, 0.2, 6);
  for (int k = 0; k <= 6; ++k) {
    const double ref = std::pow(kTwoPi, k) * std::sin(kTwoPi * 0.2 + k * std::numbers::pi / 2);
    CHECK(std::fabs(d[k] - ref) <= 1e-6 * std::pow(kTwoPi, k));
  }
}

TEST_CASE("declared critical orders are verified") {
  CHECK(field_from_catalog("cos").smoothness() == 2);
  CHECK(field_from_catalog("cos_quartic").smoothness() == 4);
  CHECK(field_from_catalog("cos_sextic").smoothness() == 6);
  CHECK(field_from_catalog("linear").smoothness() == 1);
  const auto cosf = [](double x) { return std::cos(kTwoPi * x); };
  CHECK_THROWS_AS(VelocityField1D("bad", cosf, {{0.0, 3}}), PreconditionError);
  CHECK_THROWS_AS(VelocityField1D("bad", cosf, {{0.25, 1}}), PreconditionError);
  CHECK_NOTHROW(VelocityField1D("unchecked", cosf, {{0.25, 1}}, false));
  CHECK_THROWS_AS(field_from_catalog("nope"), PreconditionError);
}

TEST_CASE("cos phase matches the Bessel series") {
  const auto f = field_from_catalog("cos");
  double worst = 0;
  for (double t = 0; t <= 50; t += 0.37) {
    const double ref = oracle::bessel_j0(kTwoPi * t);
    worst = std::max(worst, std::abs(oscillatory_integral(f, 1, t) - ref));
    worst = std::max(worst, std::abs(oscillatory_integral(f, 1, t, QuadMode::dense) - ref));
  }
  CHECK(worst < 1e-9);
  // xi scales time.
  CHECK(std::abs(oscillatory_integral(f, 3, 2.0) - oracle::bessel_j0(kTwoPi * 6)) < 1e-9);
  CHECK(std::abs(oscillatory_integral(f, -3, 2.0) - oracle::bessel_j0(kTwoPi * 6)) < 1e-9);
}

TEST_CASE("linear phase has a closed form") {
  const auto f = field_from_catalog("linear");
  for (double t : {0.3, 1.0, 7.5, 1234.25}) {
    const cplx ref = (oracle::cis(t) - 1.0) / cplx(0, kTwoPi * t);
    CHECK(std::abs(oscillatory_integral(f, 1, t) - ref) < 1e-12);
  }
  Chart c;
  c.a = 0.25;
  c.b = 0.75;
  c.weight = [](double x) { return 2 * x; };
  // integral of 2x e(t x) over [1/4, 3/4], integrated by parts.
  const double t = 9.7;
  const cplx iw(0, kTwoPi * t);
  const cplx ref = (1.5 * oracle::cis(0.75 * t) - 0.5 * oracle::cis(0.25 * t)) / iw -
                   2.0 * (oracle::cis(0.75 * t) - oracle::cis(0.25 * t)) / (iw * iw);
  CHECK(std::abs(oscillatory_integral(f, 1, t, QuadMode::filon, c) - ref) < 1e-12);
  CHECK(std::abs(oscillatory_integral(f, 1, t, QuadMode::dense, c) - ref) < 1e-12);
}

TEST_CASE("Filon and dense quadrature agree") {
  for (const auto& name : {"cos_quartic", "cos_sextic"}) {
    const auto f = field_from_catalog(name);
    for (double t : {0.5, 13.0, 250.0, 3000.0})
      CHECK(std::abs(oscillatory_integral(f, 1, t) - oscillatory_integral(f, 1, t, QuadMode::dense)) < 1e-10);
  }
  CHECK_THROWS_AS(oscillatory_integral(field_from_catalog("cos"), 1, 1e6, QuadMode::dense), BudgetError);
  CHECK(oscillatory_integral(field_from_catalog("cos"), 1, 0.0) == cplx(1.0));
}

TEST_CASE("stationary phase decay orders") {
  const auto ts = fit_grid();
  CHECK(phase_decay_order(field_from_catalog("cos"), 1, ts).order.value() == doctest::Approx(0.5).epsilon(0.1));
  CHECK(phase_decay_order(field_from_catalog("cos_quartic"), 1, ts).order.value() ==
        doctest::Approx(0.25).epsilon(0.2));
  const auto serial = phase_decay_order(field_from_catalog("cos"), 1, ts, 12, {}, Exec::serial);
  const auto parallel = phase_decay_order(field_from_catalog("cos"), 1, ts, 12, {}, Exec::parallel);
  CHECK(serial.envelope == parallel.envelope);
  CHECK_THROWS_AS(phase_decay_order(field_from_catalog("cos"), 1, {1, 2, 3}), PreconditionError);
}

TEST_CASE("critical point scan") {
  const auto q = critical_points_scan(field_from_catalog("cos_quartic"), 1);
  REQUIRE(q.points.size() == 2);
  CHECK(q.points[0].location == doctest::Approx(0.0));
  CHECK(q.points[0].order == 1);
  CHECK(q.points[1].location == doctest::Approx(0.5));
  CHECK(q.points[1].order == 3);
  const auto s = critical_points_scan(field_from_catalog("cos_sextic"), 2);
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[1].order == 5);
  CHECK(critical_points_scan(field_from_catalog("const"), 1).degenerate_everywhere);
  const auto osc = VelocityField1D("fast", [](double x) { return std::cos(kTwoPi * 300 * x); }, {}, false);
  CHECK_THROWS_AS(critical_points_scan(osc, 1, 64), RefinementRequired);
  CHECK(critical_points_scan(osc, 1, 4096).points.size() == 600);
}

TEST_CASE("push-forward transforms: Monte-Carlo against quadrature") {
  const auto dens = Measure1D::density_from([](double x) { return 1 + std::cos(kTwoPi * x); }, 16);
  for (const auto& base : {Measure1D::uniform(), dens, Measure1D::atomic({{0.1, 0.5}, {0.35, 0.5}})}) {
    const auto spec = make_pushforward(base, field_from_catalog("cos_quartic"), 2, Wrap::none);
    for (double t : {0.7, 3.0, 11.0}) {
      const auto mc = pushforward_char(spec, t, 200000, 17);
      CHECK(std::abs(mc.value - pushforward_transform(spec, t)) < 4 * std::sqrt(2.0) * mc.stderr() + 1e-12);
    }
    CHECK(std::abs(pushforward_transform(spec, -3.0) - std::conj(pushforward_transform(spec, 3.0))) < 1e-15);
  }
  const auto b = make_pushforward(Measure1D::bernoulli(2.5), field_from_catalog("cos"), 1, Wrap::none);
  CHECK_THROWS_AS(pushforward_transform(b, 1.0), PreconditionError);
  CHECK_NOTHROW(pushforward_char(b, 1.0, 1000, 1));
}

TEST_CASE("wrapped push-forward drops integer values") {
  const auto spec = make_pushforward(Measure1D::uniform(), field_from_catalog("const"), 2, Wrap::mod1);
  CHECK_THROWS_AS(pushforward_char(spec, 1.0, 1000, 1), DegenerateError);
  const auto lin = make_pushforward(Measure1D::uniform(), field_from_catalog("linear"), 1, Wrap::mod1);
  const auto e = pushforward_char(lin, 1.0, 100000, 1);
  CHECK(std::abs(e.value) < 4 * e.stderr());
  CHECK_THROWS_AS(make_pushforward(Measure1D::uniform(), field_from_catalog("cos"), 0, Wrap::none), PreconditionError);
}

TEST_CASE("piecewise polynomial fields from CSV") {
  const std::string path = "field_pieces.csv";
  {
    std::ofstream out(path);
    out << "x0,x1,c0,c1,c2\n0,0.5,0,1,0\n0.5,1,0.5,1,4\n";
  }
  const auto f = field_from_csv(path);
  CHECK(f(0.25) == doctest::Approx(0.25));
  CHECK(f(0.75) == doctest::Approx(0.5 + 0.25 + 4 * 0.0625));
  CHECK(f.breaks() == std::vector<double>{0.5});
  // integral of e(t v) piece by piece against dense quadrature on each piece.
  const double t = 17.3;
  Chart left{0.0, 0.5, {}, {}}, right{0.5, 1.0, {}, {}};
  const cplx sum = oscillatory_integral(f, 1, t, QuadMode::dense, left) + oscillatory_integral(f, 1, t, QuadMode::dense, right);
  CHECK(std::abs(oscillatory_integral(f, 1, t) - sum) < 1e-12);
  {
    std::ofstream out(path);
    out << "0,0.4,1\n0.5,1,1\n";
  }
  CHECK_THROWS_AS(field_from_csv(path), PreconditionError);
  std::remove(path.c_str());
}

TEST_CASE("piecewise fields must be continuous") {
  const std::string path = "field_jump.csv";
  {
    std::ofstream out(path);
    out << "0,0.5,0,1\n0.5,1,2,1\n";
  }
  CHECK_THROWS_AS(field_from_csv(path), PreconditionError);
  std::remove(path.c_str());
}
