#include "kepshear/decay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kepshear/errors.hpp"

namespace kepshear {

DecayOrder DecayOrder::finite(double r) {
  if (!std::isfinite(r) || r < 0.0) throw PreconditionError("decay order must be finite and >= 0");
  return DecayOrder(false, r);
}

double DecayOrder::value() const {
  if (infinite_) throw std::logic_error("DecayOrder: value() of the +inf sentinel");
  return value_;
}

std::string DecayOrder::str() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value_);
  return buf;
}

DecayEstimate fit_envelope(std::span<const double> t, std::span<const double> magnitude, std::size_t blocks) {
  require(t.size() == magnitude.size(), "fit_envelope: abscissa/value length mismatch");
  require(t.size() >= 2, "fit_envelope: need at least two samples");
  require(blocks >= 1, "fit_envelope: need at least one block");
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(std::isfinite(t[i]) && t[i] > 0.0, "fit_envelope: abscissae must be positive");
    require(i == 0 || t[i] > t[i - 1], "fit_envelope: abscissae must be strictly increasing");
    require(std::isfinite(magnitude[i]) && magnitude[i] >= 0.0, "fit_envelope: magnitudes must be finite");
  }

  const double lo = std::log(t.front());
  const double span = std::log(t.back()) - lo;
  std::vector<double> first(blocks, 0.0), peak(blocks, -1.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto b = static_cast<std::size_t>(std::floor(static_cast<double>(blocks) * (std::log(t[i]) - lo) / span));
    b = std::min(b, blocks - 1);
    if (peak[b] < 0.0) first[b] = t[i];
    peak[b] = std::max(peak[b], magnitude[i]);
  }

  DecayEstimate est;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (peak[b] < 0.0) continue;
    est.freqs.push_back(first[b]);
    est.envelope.push_back(peak[b]);
  }
  est.block_count = est.freqs.size();
  require(est.block_count >= 2, "fit_envelope: fewer than two non-empty blocks");

  for (std::size_t b = est.envelope.size() - 1; b-- > 0;)
    est.envelope[b] = std::max(est.envelope[b], est.envelope[b + 1]);

  if (est.envelope.back() < kEnvelopeFloor) {
    est.order = DecayOrder::infinite();
    return est;
  }

  const auto n = static_cast<double>(est.block_count);
  double sx = 0, sy = 0;
  for (std::size_t b = 0; b < est.block_count; ++b) {
    sx += std::log(est.freqs[b]);
    sy += std::log(est.envelope[b]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t b = 0; b < est.block_count; ++b) {
    const double dx = std::log(est.freqs[b]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(est.envelope[b]) - my);
  }
  const double slope = sxy / sxx;
  est.intercept = my - slope * mx;
  double rss = 0;
  for (std::size_t b = 0; b < est.block_count; ++b) {
    const double r = std::log(est.envelope[b]) - (est.intercept + slope * std::log(est.freqs[b]));
    rss += r * r;
  }
  est.residual_rms = std::sqrt(rss / n);
  est.order = DecayOrder::finite(std::max(0.0, -slope));
  return est;
}

std::vector<double> envelope_points(const EnvelopeGrid& g) {
  require(std::isfinite(g.t_min) && std::isfinite(g.t_max) && g.t_min > 0.0 && g.t_min < g.t_max,
          "envelope grid: need 0 < t_min < t_max");
  require(g.blocks >= 1 && g.per_block >= 1, "envelope grid: blocks and per_block must be positive");
  std::vector<double> pts;
  const double ratio = std::pow(g.t_max / g.t_min, 1.0 / static_cast<double>(g.blocks));
  for (std::size_t b = 0; b < g.blocks; ++b) {
    const double a = g.t_min * std::pow(ratio, static_cast<double>(b));
    const double z = b + 1 == g.blocks ? g.t_max : g.t_min * std::pow(ratio, static_cast<double>(b + 1));
    if (g.integers) {
      const auto first = static_cast<long long>(std::ceil(a));
      // Half-open blocks except the last, which includes t_max.
      auto last = static_cast<long long>(std::floor(z));
      if (b + 1 != g.blocks && static_cast<double>(last) == z) --last;
      if (last < first) continue;
      const auto count = static_cast<unsigned long long>(last - first + 1);
      const unsigned long long stride = count > g.integer_cap ? (count + g.integer_cap - 1) / g.integer_cap : 1;
      for (long long k = first; k <= last; k += static_cast<long long>(stride)) pts.push_back(static_cast<double>(k));
    } else {
      for (std::size_t j = 0; j < g.per_block; ++j)
        pts.push_back(a + (z - a) * static_cast<double>(j) / static_cast<double>(g.per_block));
      if (b + 1 == g.blocks) pts.push_back(z);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

DecayEstimate fit_transform(const std::function<cplx(double)>& fn, const EnvelopeGrid& grid, Exec exec) {
  const auto pts = envelope_points(grid);
  const auto mags = indexed_map<double>(pts.size(), exec, [&](std::size_t i) { return std::abs(fn(pts[i])); });
  return fit_envelope(pts, mags, grid.blocks);
}

}  // namespace kepshear
