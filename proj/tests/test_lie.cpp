#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "doctest.h"
#include "kepshear/errors.hpp"
#include "kepshear/lie.hpp"

using namespace kepshear;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

}  // namespace

TEST_CASE("generators and Rodrigues exponentials") {
  CHECK_THROWS_AS(make_generator(Vec3(1, 1, 0), 1.0), PreconditionError);
  CHECK_THROWS_AS(make_generator(Vec3::UnitX(), -1.0), PreconditionError);
  const Vec3 n = Vec3(1, 2, 2) / 3.0;
  const auto g = make_generator(n, 1.7);
  const Vec3 v(0.3, -0.2, 0.9);
  CHECK((cross_matrix(n) * v - n.cross(v)).norm() < 1e-15);
  for (double t : {0.0, 0.4, 2.5, -7.0}) {
    const Mat3 R = rodrigues_exp(g, t);
    CHECK((R * R.transpose() - Mat3::Identity()).norm() < 1e-13);
    CHECK(R.determinant() == doctest::Approx(1.0));
    const Mat3 ref = Eigen::AngleAxisd(1.7 * t, n).toRotationMatrix();
    CHECK((R - ref).norm() < 1e-13);
    CHECK((rodrigues_exp(g, t) * rodrigues_exp(g, 0.9) - rodrigues_exp(g, t + 0.9)).norm() < 1e-13);
  }
}

TEST_CASE("quaternion conversion matches Eigen") {
  const Eigen::Vector4d q = Eigen::Vector4d(0.3, -0.5, 0.1, 0.8).normalized();
  const Mat3 ref = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
  CHECK((quaternion_to_rotation(q) - ref).norm() < 1e-14);
  CHECK((quaternion_to_rotation(-q) - ref).norm() < 1e-14);
}

TEST_CASE("Haar samples have the Haar moments") {
  const std::size_t n = 200000;
  const auto ms = haar_sample_so3(5, n);
  Mat3 mean = Mat3::Zero(), second = Mat3::Zero();
  double tr = 0, tr2 = 0;
  for (const auto& M : ms) {
    mean += M;
    second += M.cwiseProduct(M);
    tr += M.trace();
    tr2 += M.trace() * M.trace();
  }
  mean /= double(n);
  second /= double(n);
  const double se = std::sqrt(1.0 / 3 / n);
  CHECK(mean.cwiseAbs().maxCoeff() < 5 * se);
  CHECK((second.array() - 1.0 / 3).abs().maxCoeff() < 0.005);
  CHECK(std::fabs(tr / n) < 0.01);
  CHECK(std::fabs(tr2 / n - 1.0) < 0.02);
  for (const auto& q : haar_sample_su2(5, 100)) CHECK(q.norm() == doctest::Approx(1.0));
  const auto a = haar_sample_so3(9, 5000, Exec::serial), b = haar_sample_so3(9, 5000, Exec::parallel);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
  CHECK(same);
}

TEST_CASE("generator catalog") {
  const auto lin = generator_from_catalog("linear");
  CHECK(lin.fixed_axis());
  CHECK(lin.at(0.25).omega == doctest::Approx(kTwoPi / 4));
  const auto c = generator_from_catalog("cos");
  for (double x = 0; x < 1; x += 0.01) CHECK(c.at(x).omega >= 0);
  CHECK(generator_from_catalog("zero").at(0.3).omega == 0);
  const auto tilt = generator_from_catalog("tilt");
  CHECK(!tilt.fixed_axis());
  CHECK(tilt.at(0.1).axis.norm() == doctest::Approx(1.0));
  CHECK((tilt.at(0.1).axis - tilt.at(0.4).axis).norm() > 0.1);
  CHECK_THROWS_AS(generator_from_catalog("nope"), PreconditionError);
}

TEST_CASE("covariance at t = 0 and the linear oracle") {
  LieFlowSpec spec{Measure1D::uniform(), generator_from_catalog("linear")};
  const std::vector<double> ts{0.0, 0.3, 0.75, 1.6};
  const auto r = lie_cov_mc(spec, ts, 200000, 7);
  REQUIRE(r.prediction.size() == ts.size());
  CHECK(r.prediction[0] == doctest::Approx(1.0 / 3));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    // E[M00 (R_t M)00] = R_t(0, 0) / 3 averaged over x, R_t(0, 0) = cos(2 pi t x).
    const double oracle = t == 0 ? 1.0 / 3 : std::sin(kTwoPi * t) / (3 * kTwoPi * t);
    CHECK(r.prediction[i] == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::abs(r.mc.values[i] - oracle) < 4 * std::sqrt(2.0) * r.mc.stderrs[i]);
  }
}

TEST_CASE("Monte-Carlo matches the reduced prediction") {
  const Vec3 axis = Vec3(0, 0.6, 0.8);
  const auto dens = Measure1D::density_from([](double x) { return 1 + std::cos(kTwoPi * x); }, 32);
  for (const auto& base : {Measure1D::uniform(), dens, Measure1D::atomic({{0.2, 0.5}, {0.7, 0.5}})}) {
    for (auto group : {LieGroup::so3, LieGroup::su2}) {
      LieFlowSpec spec{base, generator_from_catalog("cos_quartic", axis), {1, 2}, {2, 2}, group};
      const std::vector<double> ts{0.5, 1.0, 3.0};
      const auto r = lie_cov_mc(spec, ts, 100000, 13);
      REQUIRE(r.prediction.size() == ts.size());
      for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(std::abs(r.mc.values[i] - r.prediction[i]) < 4 * std::sqrt(2.0) * r.mc.stderrs[i] + 1e-12);
    }
  }
}

TEST_CASE("varying axes have no reduction") {
  LieFlowSpec spec{Measure1D::uniform(), generator_from_catalog("tilt")};
  const auto r = lie_cov_mc(spec, {0.0, 1.0}, 1000, 1);
  CHECK(r.prediction.empty());
  CHECK_THROWS_AS(orbit_torus_reduce(spec), PreconditionError);
  LieFlowSpec bad{Measure1D::uniform(), generator_from_catalog("linear"), {3, 0}};
  CHECK_THROWS_AS(validate(bad), PreconditionError);
}

TEST_CASE("reduction of the linear field is the Lebesgue transform") {
  LieFlowSpec spec{Measure1D::uniform(), generator_from_catalog("linear")};
  const auto red = orbit_torus_reduce(spec);
  for (double t : {0.5, 2.0, 7.25})
    CHECK(std::abs(pushforward_transform(red, t) - char_fn(Measure1D::uniform(), t)) < 1e-12);
}

TEST_CASE("serial and parallel Lie estimates agree bit for bit") {
  LieFlowSpec spec{Measure1D::uniform(), generator_from_catalog("cos")};
  const auto a = lie_cov_mc(spec, {0.5, 2.0}, 20000, 3, Exec::serial);
  const auto b = lie_cov_mc(spec, {0.5, 2.0}, 20000, 3, Exec::parallel);
  CHECK(a.mc.values == b.mc.values);
  CHECK(a.mc.stderrs == b.mc.stderrs);
}
