#pragma once

// Velocity fields on the circle, their push-forward measures and the
// stationary-phase decay of  integral_0^1 exp(2 i pi t xi v(x)) dx.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kepshear/decay.hpp"
#include "kepshear/errors.hpp"
#include "kepshear/filon.hpp"
#include "kepshear/measure.hpp"

namespace kepshear {

/// Critical point of order q: v' .. v^(q) vanish, v^(q+1) does not.
struct CriticalPoint {
  double location;
  int order;
};

/// Derivatives v^(0..max_order)(x0) from a least-squares polynomial fit on
/// Chebyshev points of [x0 - h, x0 + h].
std::vector<double> taylor_derivatives(const std::function<double(double)>& v, double x0, int max_order,
                                       double h = 0.05);

class VelocityField1D {
 public:
  /// With `verify`, each declared order q is checked: derivatives 1..q below
  /// 1e-5 and derivative q+1 above 1e-3, both relative to the largest value
  /// of that derivative over a 64-point grid.
  VelocityField1D(std::string name, std::function<double(double)> v, std::vector<CriticalPoint> declared,
                  bool verify = true);

  double operator()(double x) const { return v_(x); }
  const std::function<double(double)>& fn() const { return v_; }
  const std::string& name() const { return name_; }
  const std::vector<CriticalPoint>& declared() const { return declared_; }
  /// l = 1 + largest declared order (1 with no declared critical points).
  int smoothness() const;
  /// max |v'| over [0, 1] away from breaks (grid estimate, padded by 10%).
  double max_slope() const { return max_slope_; }
  /// Breakpoints of piecewise definitions (empty for smooth fields).
  const std::vector<double>& breaks() const { return breaks_; }
  void set_breaks(std::vector<double> b);

 private:
  std::string name_;
  std::function<double(double)> v_;
  std::vector<CriticalPoint> declared_;
  std::vector<double> breaks_;
  double max_slope_ = 0.0;

  void measure_slope();
};

/// Built-in fields: cos, cos_quartic, cos_sextic, linear, const (0.5).
VelocityField1D field_from_catalog(const std::string& name);
std::vector<std::string> catalog_names();

/// Piecewise polynomial: rows x0,x1,c0,c1,... meaning v = sum c_k (x - x0)^k
/// on [x0, x1); the pieces must tile [0, 1) and join continuously. No
/// critical points are declared.
VelocityField1D field_from_csv(const std::string& path);

enum class Wrap { none, mod1 };

struct PushforwardSpec {
  Measure1D base;
  VelocityField1D field;
  int xi = 1;
  Wrap wrap = Wrap::none;
};

PushforwardSpec make_pushforward(Measure1D base, VelocityField1D field, int xi, Wrap wrap);

/// Monte-Carlo transform of the law of s = xi v(x), x ~ base. With mod1 the
/// samples with s = 0 mod 1 (within 1e-12) are dropped and the rest
/// renormalized; DegenerateError when nothing is retained.
Estimate pushforward_char(const PushforwardSpec& spec, double t, std::size_t n_samples, std::uint64_t seed,
                          Exec exec = Exec::parallel);

/// Deterministic transform of the push-forward (wrap none): quadrature
/// against the base density for uniform/density bases, a finite sum for
/// atomic ones. Other bases need pushforward_char.
cplx pushforward_transform(const PushforwardSpec& spec, double t);

/// Envelope fit of |pushforward_transform| (same preconditions as the
/// Measure1D overload: 1 <= t_min < t_max, blocks >= 8).
DecayEstimate rajchman_fit(const PushforwardSpec& spec, const EnvelopeGrid& grid, Exec exec = Exec::parallel);

enum class QuadMode { filon, dense };

/// Optional amplitude on a sub-interval (the integrand is zero outside).
struct Chart {
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> weight;  // empty means 1
  std::vector<double> breaks;
};

/// integral_a^b w(x) exp(2 i pi t xi v(x)) dx. Dense mode uses at least 20
/// panels per oscillation and throws BudgetError when that exceeds 2e6.
cplx oscillatory_integral(const VelocityField1D& field, int xi, double t, QuadMode mode = QuadMode::filon,
                          const Chart& chart = {});

/// Envelope fit of |oscillatory_integral| over the given increasing grid
/// (at least 24 points, positive times).
DecayEstimate phase_decay_order(const VelocityField1D& field, int xi, const std::vector<double>& t_grid,
                                std::size_t blocks = 12, const Chart& chart = {}, Exec exec = Exec::parallel);

/// Thrown when two critical points share a scan cell.
class RefinementRequired : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct CriticalScan {
  bool degenerate_everywhere = false;
  std::vector<CriticalPoint> points;
};

/// Sign changes of (xi v)' on a uniform circular grid, refined by bisection to
/// 1e-10, with orders from the Taylor derivatives at each root.
CriticalScan critical_points_scan(const VelocityField1D& field, int xi, std::size_t grid_size = 1024);

}  // namespace kepshear
