#pragma once

// Shrinking-target hit counting along transvection orbits and rotations.

#include <cstdint>
#include <string>
#include <vector>

#include "kepshear/measure.hpp"

namespace kepshear {

/// Targets A_n = T x ball(b_n, r_n) with r_n = C n^{-p}. A ball of radius
/// >= 1/2 is the whole circle, so its measure is min(2 r_n, 1).
struct TargetScheme {
  double C = 1.0;
  double p = 0.25;
  std::size_t N_max = 100000;
  /// Explicit centers b_1..b_N (index 0 is b_1); empty means b_n = frac(n g)
  /// with g = (sqrt 5 - 1) / 2.
  std::vector<double> centers;

  double radius(std::size_t n) const;
  double center(std::size_t n) const;
};

void validate(const TargetScheme& s);

struct ExpectationSeries {
  std::vector<std::size_t> N;
  std::vector<double> partial_sum;  // 2 sum_{k<=N} C k^{-p}
  std::vector<double> clamped_sum;  // sum_{k<=N} min(2 C k^{-p}, 1), the exact E(S_N)
  std::vector<double> asymptotic;   // 2 C N^{1-p} / (1 - p)
  std::vector<double> relative_gap;  // |partial - asymptotic| / asymptotic
};

ExpectationSeries expectation_series(const TargetScheme& s, const std::vector<std::size_t>& checkpoints);

struct HitEnsemble {
  std::vector<std::size_t> checkpoints;
  std::vector<double> expectation;  // exact E(S_N) at each checkpoint
  /// counts[o][c] = S_N of orbit o at checkpoint c.
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::string> warnings;

  /// Mean over orbits of S_N / E(S_N) at checkpoint c.
  double ratio_mean(std::size_t c) const;
  /// Standard error of that mean.
  double ratio_stderr(std::size_t c) const;
  /// max over orbits of |S_N - E(S_N)| at checkpoint c.
  double max_deviation(std::size_t c) const;
};

/// (x, y) ~ base x Lebesgue per orbit; counts k <= N with frac(y + k x) in
/// ball(b_k, r_k). Requires 0 <= p < 1; p >= 1/2 adds a warning.
HitEnsemble run_counting(const Measure1D& base, const TargetScheme& scheme, std::size_t n_orbits, std::uint64_t seed,
                         std::vector<std::size_t> checkpoints, Exec exec = Exec::parallel);

void write_hits_csv(const HitEnsemble& h, const std::string& path);

struct MstpResult {
  double fraction = 0.0;
  double expected_late = 0.0;     // sum over (sqrt N, N] of 2 r_n
  double growth_threshold = 0.5;  // fraction of expected_late a point must reach
  std::vector<std::uint64_t> late_counts;
};

/// Rotation y -> y + alpha. Point y counts as having unbounded growth when its
/// hits in the late window (sqrt N, N] on ball(0, min(C n^{-1/s}, 1/2)) reach
/// growth_threshold * expected_late.
MstpResult mstp_experiment(double alpha, double s, double C, std::size_t n_points, std::size_t N_max,
                           std::uint64_t seed, double growth_threshold = 0.5, Exec exec = Exec::parallel);

/// Circular distance on T.
inline double circle_dist(double a, double b) {
  const double d = frac(a - b);
  return d < 0.5 ? d : 1.0 - d;
}

}  // namespace kepshear
