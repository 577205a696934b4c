#include <cmath>
#include <limits>

#include "doctest.h"
#include "kepshear/decay.hpp"
#include "kepshear/errors.hpp"

using namespace kepshear;

TEST_CASE("DecayOrder sentinel stays symbolic") {
  const auto inf = DecayOrder::infinite();
  CHECK(inf.is_infinite());
  CHECK(inf.str() == "inf");
  CHECK_THROWS_AS(inf.value(), std::logic_error);
  CHECK(inf.min_with(0.5) == 0.5);
  CHECK_FALSE(inf.at_most(1e300));
  CHECK(inf.at_least(1e300));

  const auto r = DecayOrder::finite(0.25);
  CHECK(r.min_with(1.0) == 0.25);
  CHECK(r.min_with(0.1) == 0.1);
  CHECK(r.at_most(0.25));
  CHECK_THROWS_AS(DecayOrder::finite(-0.1), PreconditionError);
  CHECK_THROWS_AS(DecayOrder::finite(std::numeric_limits<double>::infinity()), PreconditionError);
}

TEST_CASE("envelope fit recovers an exact power law") {
  std::vector<double> t, m;
  for (int i = 1; i <= 2000; ++i) {
    t.push_back(i);
    m.push_back(3.0 * std::pow(i, -0.7));
  }
  const auto e = fit_envelope(t, m, 12);
  CHECK(e.order.value() == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(std::exp(e.intercept) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(e.residual_rms < 1e-9);
  for (std::size_t b = 1; b < e.freqs.size(); ++b) {
    CHECK(e.freqs[b] > e.freqs[b - 1]);
    CHECK(e.envelope[b] <= e.envelope[b - 1]);
  }
}

TEST_CASE("envelope uses the running supremum, so oscillation does not fake decay") {
  std::vector<double> t, m;
  for (int i = 1; i <= 5000; ++i) {
    t.push_back(i);
    m.push_back(i % 97 == 0 ? 0.5 : 1e-6);
  }
  CHECK(fit_envelope(t, m, 10).order.value() < 0.05);
}

TEST_CASE("constant magnitudes give order 0; vanishing tail gives the +inf sentinel") {
  std::vector<double> t{1, 2, 4, 8, 16, 32, 64, 128}, c(8, 0.3), z{1, 0.5, 0.1, 0, 0, 0, 0, 0};
  CHECK(fit_envelope(t, c, 8).order.value() == doctest::Approx(0.0));
  CHECK(fit_envelope(t, z, 8).order.is_infinite());
  std::vector<double> zeros(8, 0.0);
  CHECK(fit_envelope(t, zeros, 8).order.is_infinite());
}

TEST_CASE("fit_envelope rejects malformed input") {
  std::vector<double> t{1, 2, 2}, m{1, 1, 1};
  CHECK_THROWS_AS(fit_envelope(t, m, 4), PreconditionError);
  std::vector<double> t2{1, 2}, m2{1};
  CHECK_THROWS_AS(fit_envelope(t2, m2, 4), PreconditionError);
}

TEST_CASE("integer envelope grids are sorted integers covering the range") {
  EnvelopeGrid g;
  g.t_min = 1;
  g.t_max = 1000;
  g.blocks = 10;
  g.integers = true;
  const auto p = envelope_points(g);
  CHECK(p.front() == 1.0);
  CHECK(p.back() == 1000.0);
  CHECK(p.size() == 1000);
  g.integer_cap = 16;
  const auto q = envelope_points(g);
  CHECK(q.size() < 200);
  for (double x : q) CHECK(x == std::floor(x));
}
