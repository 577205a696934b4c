#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kepshear/parallel.hpp"
#include "kepshear/stats.hpp"

namespace kepshear {

/// A power-law decay order r >= 0 or the +infinity sentinel.
///
/// The sentinel never takes part in floating arithmetic: bounds such as
/// min{s/2 - 1, r} go through `min_with` and comparisons, which treat it
/// symbolically.
class DecayOrder {
 public:
  static DecayOrder finite(double r);
  static DecayOrder infinite() { return DecayOrder(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error for the sentinel.
  double value() const;
  std::string str() const;

  /// min{x, *this} as a plain number (x is returned when *this is +inf).
  double min_with(double x) const { return infinite_ ? x : (value_ < x ? value_ : x); }
  /// True when *this <= x (never for +inf).
  bool at_most(double x) const { return !infinite_ && value_ <= x; }
  bool at_least(double x) const { return infinite_ || value_ >= x; }

  friend bool operator==(const DecayOrder&, const DecayOrder&) = default;

 private:
  DecayOrder(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

/// Magnitudes below this are treated as exact zeros by every envelope fit.
inline constexpr double kEnvelopeFloor = 1e-14;

/// Frequency envelope of a transform (or of a covariance curve) with its
/// fitted power-law order.
///
/// `freqs[b]` is the first sampled frequency of block b and `envelope[b]` is
/// the largest magnitude seen at or beyond that block. The fit regresses
/// log envelope = intercept - order * log freq.
struct DecayEstimate {
  std::vector<double> freqs;
  std::vector<double> envelope;
  DecayOrder order = DecayOrder::finite(0.0);
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t block_count = 0;
};

/// Blockwise envelope fit of |values| sampled at increasing positive
/// abscissae `t`. Blocks are `blocks` geometric cells spanning [t.front(),
/// t.back()]; empty cells are skipped. Returns +inf when the envelope is
/// below kEnvelopeFloor on the last block (the transform vanishes to working
/// precision at the top of the range). Slopes are clamped at 0.
DecayEstimate fit_envelope(std::span<const double> t, std::span<const double> magnitude, std::size_t blocks);

/// Frequency grid for envelope sampling.
struct EnvelopeGrid {
  double t_min = 1.0;
  double t_max = 1e4;
  std::size_t blocks = 16;
  bool integers = false;
  /// Sample points per block on real grids; cap per block on integer grids
  /// (integer blocks longer than this are subsampled with a uniform stride).
  std::size_t per_block = 256;
  std::size_t integer_cap = 1u << 15;
};

/// Sample points of `grid` (sorted, de-duplicated).
std::vector<double> envelope_points(const EnvelopeGrid& grid);

/// Evaluates |fn| on the grid (in parallel, ordered) and fits the envelope.
DecayEstimate fit_transform(const std::function<cplx(double)>& fn, const EnvelopeGrid& grid,
                            Exec exec = Exec::parallel);

}  // namespace kepshear
