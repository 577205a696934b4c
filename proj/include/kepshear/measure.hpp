#pragma once

// One-dimensional probability measures and their Fourier transforms.
//
// Transforms use the positive-exponent convention
//     mu^(t) = integral of exp(2 i pi t x) d mu(x),
// so mu^(0) = 1, |mu^(t)| <= 1 and mu^(-t) = conj(mu^(t)).

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kepshear/decay.hpp"
#include "kepshear/parallel.hpp"
#include "kepshear/stats.hpp"

namespace kepshear {

/// Lebesgue measure on T = [0, 1).
struct UniformTorus {};

/// Piecewise-constant density on G equal cells of [0, 1); values average to 1.
struct DensityGrid {
  std::vector<double> values;
};

struct Atom {
  double position;  // in [0, 1)
  double weight;    // in (0, 1]
};

/// Finite sum of point masses.
struct Atomic {
  std::vector<Atom> atoms;
};

/// Law of sum_{n>=1} +-theta^{-n} with independent fair signs (theta > 2).
/// Supported on (-1/(theta-1), 1/(theta-1)) in R.
struct BernoulliConvolution {
  double theta;
};

/// Uniform law on a finite list of samples.
struct Empirical {
  std::vector<double> samples;
};

enum class MeasureKind { uniform, density, atomic, bernoulli, empirical };

/// Validated measure. Construct through the named factories, which enforce
/// the invariants of each representation.
class Measure1D {
 public:
  using Rep = std::variant<UniformTorus, DensityGrid, Atomic, BernoulliConvolution, Empirical>;

  static Measure1D uniform();
  /// Values must be >= 0 with mean 1 (within 1e-12).
  static Measure1D density(std::vector<double> values);
  /// Rescales nonnegative values to mean 1 first.
  static Measure1D density_normalized(std::vector<double> values);
  /// Samples `fn` at cell midpoints and normalizes.
  template <class Fn>
  static Measure1D density_from(Fn&& fn, std::size_t cells) {
    std::vector<double> v(cells);
    for (std::size_t j = 0; j < cells; ++j) v[j] = fn((static_cast<double>(j) + 0.5) / static_cast<double>(cells));
    return density_normalized(std::move(v));
  }
  /// Weights must sum to 1 (within 1e-12), positions distinct in [0, 1).
  static Measure1D atomic(std::vector<Atom> atoms);
  static Measure1D bernoulli(double theta);
  static Measure1D empirical(std::vector<double> samples);

  MeasureKind kind() const { return static_cast<MeasureKind>(rep_.index()); }
  const Rep& rep() const { return rep_; }
  template <class T>
  const T& as() const {
    return std::get<T>(rep_);
  }

  /// No point masses (uniform, density, Bernoulli).
  bool is_nonatomic() const;
  /// Has a density with respect to Lebesgue on [0, 1).
  bool has_density() const { return kind() == MeasureKind::uniform || kind() == MeasureKind::density; }
  /// Supported inside [0, 1) (true for every kind except Bernoulli/Empirical).
  bool supported_in_unit_interval() const;
  /// Density value at x in [0, 1) (uniform or density kinds only).
  double density_at(double x) const;

  std::string describe() const;

 private:
  explicit Measure1D(Rep r) : rep_(std::move(r)) {}
  Rep rep_;
};

std::string to_string(MeasureKind k);

/// Fourier transform mu^(t). Throws PreconditionError for non-finite t.
cplx char_fn(const Measure1D& m, double t);

/// prod_{n>=1} cos(2 pi theta^{-n} t), truncated at the first N with
/// 2 pi theta^{-N} |t| < 1e-8. The neglected tail changes the product by at
/// most sum_{n>N} (2 pi theta^{-n} t)^2 / 2 < 1e-16, well inside 1e-12.
double bernoulli_char(double theta, double t);

/// char_fn at many frequencies. The parallel kernel and the serial reference
/// return identical values; integer frequencies on a density grid go through
/// a cached DFT of the cell values.
std::vector<cplx> char_fn_batch(const Measure1D& m, const std::vector<double>& ts, Exec exec = Exec::parallel);

/// Number of +-theta^{-k} terms drawn per Bernoulli sample. The truncation
/// error is below theta^{-60} / (theta - 1) < 2^{-79}.
inline constexpr int kBernoulliTerms = 60;

/// i.i.d. draws, deterministic in (seed, n) and independent of thread count.
std::vector<double> sample(const Measure1D& m, std::uint64_t seed, std::size_t n, Exec exec = Exec::parallel);

/// Rajchman-order estimate: envelope fit of |mu^| on a geometric grid over
/// [t_min, t_max] (integers only when `integer_grid`). Requires
/// 1 <= t_min < t_max and blocks >= 8.
DecayEstimate rajchman_fit(const Measure1D& m, double t_min, double t_max, std::size_t blocks, bool integer_grid,
                           Exec exec = Exec::parallel);
DecayEstimate rajchman_fit(const Measure1D& m, const EnvelopeGrid& grid, Exec exec = Exec::parallel);

/// KS distance between the law of (n x / a) mod 1, x ~ m, and uniform on [0, 1).
double equidistribution_stat(const Measure1D& m, long long n, double a, std::size_t n_samples, std::uint64_t seed,
                             Exec exec = Exec::parallel);

/// Parses "kind=bernoulli,theta=2.5" style descriptions. Recognized keys:
/// kind (uniform|density|atomic|bernoulli|empirical), theta, grid_file,
/// density (cos: 1+cos(2 pi x) on `cells` cells), cells, atoms
/// ("pos:weight;pos:weight"), samples_file.
Measure1D parse_measure_spec(const std::string& spec);

/// Single-column CSV of density values (header optional).
std::vector<double> load_density_csv(const std::string& path);

/// x mod 1 in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

}  // namespace kepshear
