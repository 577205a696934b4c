#include "kepshear/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector4d shoemake(std::mt19937_64& rng) {
  const double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return {b * std::cos(kTwoPi * u3), a * std::sin(kTwoPi * u2), a * std::cos(kTwoPi * u2), b * std::sin(kTwoPi * u3)};
}

GeneratorField shifted(const std::string& name, const Vec3& axis) {
  const auto v = field_from_catalog(name);
  double lo = 0.0;
  for (int i = 0; i <= 4096; ++i) lo = std::min(lo, v(i / 4096.0));
  GeneratorField f;
  f.name = name;
  f.axis = axis;
  f.omega = [v, lo](double x) { return kTwoPi * std::max(0.0, v(x) - lo); };
  f.critical = v.declared();
  return f;
}

}  // namespace

RotationGenerator make_generator(const Vec3& axis, double omega) {
  require(std::fabs(axis.norm() - 1.0) <= 1e-12, "rotation generator: axis must be a unit vector");
  require(std::isfinite(omega) && omega >= 0.0, "rotation generator: speed must be >= 0");
  return {axis, omega};
}

Mat3 cross_matrix(const Vec3& n) {
  Mat3 k;
  k << 0, -n.z(), n.y(), n.z(), 0, -n.x(), -n.y(), n.x(), 0;
  return k;
}

Mat3 rodrigues_exp(const RotationGenerator& g, double t) {
  require(std::isfinite(t), "rodrigues_exp: t must be finite");
  const Mat3 k = cross_matrix(g.axis);
  const double th = g.omega * t;
  return Mat3::Identity() + std::sin(th) * k + (1.0 - std::cos(th)) * (k * k);
}

Mat3 quaternion_to_rotation(const Eigen::Vector4d& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),  //
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),   //
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

std::vector<Eigen::Vector4d> haar_sample_su2(std::uint64_t seed, std::size_t n, Exec exec) {
  require(n >= 1, "haar sampling: n must be >= 1");
  std::vector<Eigen::Vector4d> out(n);
  indexed_map<int>(chunk_count(n), exec, [&](std::size_t c) {
    const auto r = chunk_range(n, c);
    auto rng = chunk_rng(seed, 0x4A4, c);
    for (std::size_t i = r.begin; i < r.end; ++i) out[i] = shoemake(rng);
    return 0;
  });
  return out;
}

std::vector<Mat3> haar_sample_so3(std::uint64_t seed, std::size_t n, Exec exec) {
  const auto q = haar_sample_su2(seed, n, exec);
  std::vector<Mat3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quaternion_to_rotation(q[i]);
  return out;
}

RotationGenerator GeneratorField::at(double x) const {
  return make_generator(axis_at ? axis_at(x) : axis, omega(x));
}

GeneratorField generator_from_catalog(const std::string& name, const Vec3& axis) {
  require(std::fabs(axis.norm() - 1.0) <= 1e-12, "generator field: axis must be a unit vector");
  if (name == "linear") {
    GeneratorField f;
    f.name = name;
    f.axis = axis;
    f.omega = [](double x) { return kTwoPi * x; };
    return f;
  }
  if (name == "zero") {
    GeneratorField f;
    f.name = name;
    f.axis = axis;
    f.omega = [](double) { return 0.0; };
    return f;
  }
  if (name == "cos" || name == "cos_quartic" || name == "cos_sextic") return shifted(name, axis);
  if (name == "tilt") {
    GeneratorField f;
    f.name = name;
    f.omega = [](double) { return kTwoPi; };
    f.axis_at = [](double x) { return Vec3(std::sin(std::numbers::pi * x), 0.0, std::cos(std::numbers::pi * x)); };
    return f;
  }
  throw PreconditionError("unknown generator field '" + name + "'");
}

void validate(const LieFlowSpec& spec) {
  require(spec.field.omega != nullptr, "lie flow: generator field has no speed");
  for (const auto& m : {spec.first, spec.second})
    require(m.row >= 0 && m.row < 3 && m.col >= 0 && m.col < 3, "lie flow: matrix indices must lie in 0..2");
}

LieCovResult lie_cov_mc(const LieFlowSpec& spec, const std::vector<double>& times, std::size_t n_samples,
                        std::uint64_t seed, Exec exec) {
  validate(spec);
  require(n_samples >= 2, "lie_cov_mc: need at least 2 samples");
  require(spec.base.supported_in_unit_interval(), "lie_cov_mc: base must live on [0,1)");
  for (double t : times) require(std::isfinite(t), "lie_cov_mc: times must be finite");
  const auto xs = sample(spec.base, seed, n_samples, exec);
  const int i = spec.first.row, j = spec.first.col, k = spec.second.row, l = spec.second.col;

  const auto parts = indexed_map<std::vector<ComplexMoments>>(chunk_count(n_samples), exec, [&](std::size_t c) {
    std::vector<ComplexMoments> m(times.size());
    const auto r = chunk_range(n_samples, c);
    auto rng = chunk_rng(seed, spec.group == LieGroup::so3 ? 0x503 : 0x5B2, c);
    for (std::size_t s = r.begin; s < r.end; ++s) {
      Eigen::Vector4d q = shoemake(rng);
      // SU(2) draws act through the cover; the image of a Haar SU(2) element is Haar on SO(3).
      if (spec.group == LieGroup::su2 && q[0] < 0.0) q = -q;
      const Mat3 M = quaternion_to_rotation(q);
      const auto g = spec.field.at(xs[s]);
      const double a = M(i, j);
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const Mat3 R = rodrigues_exp(g, times[ti]);
        const double b = R.row(k).dot(M.col(l));
        m[ti].add(a * b);
      }
    }
    return m;
  });

  LieCovResult res;
  res.mc.times = times;
  res.mc.method = CurveMethod::monte_carlo;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    ComplexMoments acc;
    for (const auto& p : parts) acc.merge(p[ti]);
    const auto e = acc.estimate();
    res.mc.values.push_back(e.value);
    res.mc.stderrs.push_back(e.stderr());
  }

  const auto kind = spec.base.kind();
  if (spec.field.fixed_axis() &&
      (kind == MeasureKind::uniform || kind == MeasureKind::density || kind == MeasureKind::atomic)) {
    const auto red = orbit_torus_reduce(spec);
    const Vec3& n = spec.field.axis;
    const Mat3 K = cross_matrix(n);
    const double djl = j == l ? 1.0 : 0.0, dki = k == i ? 1.0 : 0.0;
    for (double t : times) {
      const cplx nu = pushforward_transform(red, t);
      res.prediction.push_back(djl / 3.0 *
                               (n[k] * n[i] + (dki - n[k] * n[i]) * nu.real() + K(k, i) * nu.imag()));
    }
  }
  return res;
}

PushforwardSpec orbit_torus_reduce(const LieFlowSpec& spec) {
  validate(spec);
  if (!spec.field.fixed_axis())
    throw PreconditionError("orbit_torus_reduce: varying-axis generator fields are not supported");
  auto omega = spec.field.omega;
  VelocityField1D w("w:" + spec.field.name, [omega](double x) { return omega(x) / kTwoPi; }, spec.field.critical);
  return make_pushforward(spec.base, std::move(w), 1, Wrap::none);
}

}  // namespace kepshear
