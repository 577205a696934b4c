#pragma once

// Flows M -> exp(t A(x)) M on T x SO(3) (and SU(2) through its double cover).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kepshear/measure.hpp"
#include "kepshear/phase.hpp"
#include "kepshear/shear.hpp"

namespace kepshear {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// A = omega [axis]_x with a unit axis and omega >= 0.
struct RotationGenerator {
  Vec3 axis;
  double omega;
};

RotationGenerator make_generator(const Vec3& axis, double omega);

/// [n]_x, the matrix of v -> n x v.
Mat3 cross_matrix(const Vec3& n);

/// exp(t A) = I + sin(w t) K + (1 - cos(w t)) K^2 with K = [axis]_x.
Mat3 rodrigues_exp(const RotationGenerator& g, double t);

/// Unit quaternion (w, x, y, z) -> rotation matrix.
Mat3 quaternion_to_rotation(const Eigen::Vector4d& q);

/// Uniform unit quaternions (Shoemake's construction), chunk-seeded.
std::vector<Eigen::Vector4d> haar_sample_su2(std::uint64_t seed, std::size_t n, Exec exec = Exec::parallel);
std::vector<Mat3> haar_sample_so3(std::uint64_t seed, std::size_t n, Exec exec = Exec::parallel);

/// x -> generator. `fixed_axis` fields keep one axis and vary the speed.
struct GeneratorField {
  std::string name;
  Vec3 axis = Vec3::UnitZ();
  std::function<double(double)> omega;
  /// Set for fields whose axis depends on x (then `axis` is ignored).
  std::function<Vec3(double)> axis_at;
  /// Declared critical points of omega / 2 pi, used by the reduction.
  std::vector<CriticalPoint> critical;

  bool fixed_axis() const { return !axis_at; }
  RotationGenerator at(double x) const;
};

/// linear (omega = 2 pi x), zero, cos / cos_quartic / cos_sextic
/// (omega = 2 pi (v - min v)), and tilt (varying axis, omega = 2 pi).
GeneratorField generator_from_catalog(const std::string& name, const Vec3& axis = Vec3::UnitZ());

enum class LieGroup { so3, su2 };

struct MatrixIndex {
  int row;
  int col;
};

struct LieFlowSpec {
  Measure1D base;
  GeneratorField field;
  MatrixIndex first{0, 0};
  MatrixIndex second{0, 0};
  LieGroup group = LieGroup::so3;
};

void validate(const LieFlowSpec& spec);

struct LieCovResult {
  CovCurve mc;                     // Monte-Carlo covariance with stderr
  std::vector<double> prediction;  // reduced prediction (empty when unavailable)
};

/// Samples (x, M) ~ base x Haar and estimates E[M_ij (exp(t A(x)) M)_kl]
/// minus the product of the Haar means (both 0). For fixed-axis fields with a
/// deterministic reduced transform nu^ the prediction is
///   (d_jl / 3) [n_k n_i + (d_ki - n_k n_i) Re nu^(t) + [n]x_ki Im nu^(t)].
LieCovResult lie_cov_mc(const LieFlowSpec& spec, const std::vector<double>& times, std::size_t n_samples,
                        std::uint64_t seed, Exec exec = Exec::parallel);

/// Push-forward of w(x) = omega(x) / 2 pi with xi = 1 and no wrapping.
PushforwardSpec orbit_torus_reduce(const LieFlowSpec& spec);

}  // namespace kepshear
