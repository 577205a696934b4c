#include "kepshear/targets.hpp"

#include <algorithm>
#include <cmath>

#include "kepshear/csv.hpp"
#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

double TargetScheme::radius(std::size_t n) const { return C * std::pow(static_cast<double>(n), -p); }

double TargetScheme::center(std::size_t n) const {
  if (!centers.empty()) return centers[n - 1];
  return frac(static_cast<double>(n) * kGolden);
}

void validate(const TargetScheme& s) {
  require(std::isfinite(s.C) && s.C > 0.0, "target scheme: C must be > 0");
  require(std::isfinite(s.p) && s.p >= 0.0 && s.p < 1.0, "target scheme: p must lie in [0, 1)");
  require(s.N_max >= 1, "target scheme: N_max must be >= 1");
  require(s.centers.empty() || s.centers.size() >= s.N_max, "target scheme: fewer centers than N_max");
  for (double b : s.centers) require(std::isfinite(b), "target scheme: centers must be finite");
}

ExpectationSeries expectation_series(const TargetScheme& s, const std::vector<std::size_t>& checkpoints) {
  validate(s);
  require(!checkpoints.empty(), "expectation_series: need checkpoints");
  ExpectationSeries out;
  double partial = 0.0, clamped = 0.0;
  std::size_t k = 0;
  auto cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  for (std::size_t N : cps) {
    require(N >= 1, "expectation_series: checkpoints must be >= 1");
    for (; k < N; ++k) {
      const double two_r = 2.0 * s.radius(k + 1);
      partial += two_r;
      clamped += std::min(two_r, 1.0);
    }
    const double asym = 2.0 * s.C * std::pow(static_cast<double>(N), 1.0 - s.p) / (1.0 - s.p);
    out.N.push_back(N);
    out.partial_sum.push_back(partial);
    out.clamped_sum.push_back(clamped);
    out.asymptotic.push_back(asym);
    out.relative_gap.push_back(std::fabs(partial - asym) / asym);
  }
  return out;
}

double HitEnsemble::ratio_mean(std::size_t c) const {
  double acc = 0.0;
  for (const auto& o : counts) acc += static_cast<double>(o[c]) / expectation[c];
  return acc / static_cast<double>(counts.size());
}

double HitEnsemble::ratio_stderr(std::size_t c) const {
  const double m = ratio_mean(c);
  double ss = 0.0;
  for (const auto& o : counts) {
    const double d = static_cast<double>(o[c]) / expectation[c] - m;
    ss += d * d;
  }
  const auto n = static_cast<double>(counts.size());
  return counts.size() > 1 ? std::sqrt(ss / ((n - 1.0) * n)) : 0.0;
}

double HitEnsemble::max_deviation(std::size_t c) const {
  double worst = 0.0;
  for (const auto& o : counts) worst = std::max(worst, std::fabs(static_cast<double>(o[c]) - expectation[c]));
  return worst;
}

HitEnsemble run_counting(const Measure1D& base, const TargetScheme& scheme, std::size_t n_orbits, std::uint64_t seed,
                         std::vector<std::size_t> checkpoints, Exec exec) {
  validate(scheme);
  require(n_orbits >= 1, "run_counting: need at least one orbit");
  if (checkpoints.empty()) checkpoints.push_back(scheme.N_max);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  require(checkpoints.front() >= 1 && checkpoints.back() <= scheme.N_max, "run_counting: checkpoints must lie in [1, N_max]");

  HitEnsemble h;
  h.checkpoints = checkpoints;
  if (scheme.p >= 0.5) h.warnings.push_back("p >= 1/2 lies outside the worked-example regime 0 < p < 1/2");
  const std::size_t N = checkpoints.back();
  std::vector<double> centers(N), radii(N);
  for (std::size_t k = 1; k <= N; ++k) {
    centers[k - 1] = scheme.center(k);
    radii[k - 1] = scheme.radius(k);
  }
  {
    double e = 0.0;
    std::size_t c = 0;
    for (std::size_t k = 1; k <= N; ++k) {
      e += std::min(2.0 * radii[k - 1], 1.0);
      if (k == checkpoints[c]) {
        h.expectation.push_back(e);
        ++c;
      }
    }
  }

  const auto xs = sample(base, seed, n_orbits, exec);
  h.counts = indexed_map<std::vector<std::uint64_t>>(n_orbits, exec, [&](std::size_t o) {
    auto rng = chunk_rng(seed, 0x5A11, o);
    const double x = frac(xs[o]);
    const double y = uniform01(rng);
    std::vector<std::uint64_t> out;
    out.reserve(checkpoints.size());
    std::uint64_t hits = 0;
    std::size_t c = 0;
    for (std::size_t k = 1; k <= N; ++k) {
      const double pos = frac(y + frac(static_cast<double>(k) * x));
      if (circle_dist(pos, centers[k - 1]) < radii[k - 1]) ++hits;
      if (k == checkpoints[c]) {
        out.push_back(hits);
        ++c;
      }
    }
    return out;
  });
  return h;
}

void write_hits_csv(const HitEnsemble& h, const std::string& path) {
  CsvWriter w(path, {"orbit_id", "N", "S_N", "E_S_N", "ratio"});
  for (std::size_t o = 0; o < h.counts.size(); ++o)
    for (std::size_t c = 0; c < h.checkpoints.size(); ++c)
      w.row({std::to_string(o), std::to_string(h.checkpoints[c]), std::to_string(h.counts[o][c]), fmt(h.expectation[c]),
             fmt(static_cast<double>(h.counts[o][c]) / h.expectation[c])});
}

MstpResult mstp_experiment(double alpha, double s, double C, std::size_t n_points, std::size_t N_max,
                           std::uint64_t seed, double growth_threshold, Exec exec) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, "mstp: alpha must lie in (0,1)");
  require(std::isfinite(s) && s > 0.0, "mstp: s must be > 0");
  require(std::isfinite(C) && C > 0.0, "mstp: C must be > 0");
  require(n_points >= 1 && N_max >= 4, "mstp: need n_points >= 1 and N_max >= 4");
  require(growth_threshold > 0.0, "mstp: growth threshold must be > 0");
  const auto first_late = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(N_max)))) + 1;
  std::vector<double> radii(N_max + 1, 0.0);
  MstpResult res;
  res.growth_threshold = growth_threshold;
  for (std::size_t n = 1; n <= N_max; ++n) {
    radii[n] = std::min(C * std::pow(static_cast<double>(n), -1.0 / s), 0.5);
    if (n >= first_late) res.expected_late += 2.0 * radii[n];
  }
  res.late_counts = indexed_map<std::uint64_t>(n_points, exec, [&](std::size_t i) {
    auto rng = chunk_rng(seed, 0x3579, i);
    const double y = uniform01(rng);
    std::uint64_t hits = 0;
    for (std::size_t n = first_late; n <= N_max; ++n)
      if (circle_dist(frac(y + frac(static_cast<double>(n) * alpha)), 0.0) < radii[n]) ++hits;
    return hits;
  });
  std::size_t growing = 0;
  for (auto c : res.late_counts)
    if (static_cast<double>(c) >= growth_threshold * res.expected_late) ++growing;
  res.fraction = static_cast<double>(growing) / static_cast<double>(n_points);
  return res;
}

}  // namespace kepshear
