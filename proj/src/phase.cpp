#include "kepshear/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "kepshear/csv.hpp"
#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScanOrderCap = 8;

double slope_fd(const std::function<double(double)>& v, double x, double h = 1e-4) {
  return (-v(x + 2 * h) + 8 * v(x + h) - 8 * v(x - h) + v(x - 2 * h)) / (12 * h);
}

// max over a 64-point grid of |v^(j)|, j = 0..max_order.
std::vector<double> derivative_scales(const std::function<double(double)>& v, int max_order) {
  std::vector<double> scale(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int i = 0; i < 64; ++i) {
    const auto d = taylor_derivatives(v, (i + 0.5) / 64.0, max_order);
    for (std::size_t j = 0; j < d.size(); ++j) scale[j] = std::max(scale[j], std::fabs(d[j]));
  }
  return scale;
}

int estimate_order(const std::vector<double>& d, const std::vector<double>& scale) {
  for (std::size_t j = 2; j < d.size(); ++j)
    if (std::fabs(d[j]) > 1e-3 * scale[j]) return static_cast<int>(j) - 1;
  return static_cast<int>(d.size()) - 1;
}

double wrap01(double x) {
  const double f = frac(x);
  return 1.0 - f < 1e-9 ? 0.0 : f;
}

}  // namespace

std::vector<double> taylor_derivatives(const std::function<double(double)>& v, double x0, int max_order, double h) {
  require(max_order >= 0 && max_order <= 12, "taylor_derivatives: order must lie in [0, 12]");
  require(h > 0.0, "taylor_derivatives: h must be positive");
  constexpr int kPoints = 41, kDegree = 16;
  Eigen::MatrixXd V(kPoints, kDegree + 1);
  Eigen::VectorXd y(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double u = std::cos(std::numbers::pi * (i + 0.5) / kPoints);
    double p = 1.0;
    for (int k = 0; k <= kDegree; ++k, p *= u) V(i, k) = p;
    y(i) = v(x0 + h * u);
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  std::vector<double> d(static_cast<std::size_t>(max_order) + 1);
  double fact = 1.0;
  for (int k = 0; k <= max_order; ++k) {
    if (k > 0) fact *= k;
    d[static_cast<std::size_t>(k)] = fact * c(k) / std::pow(h, k);
  }
  return d;
}

VelocityField1D::VelocityField1D(std::string name, std::function<double(double)> v, std::vector<CriticalPoint> declared,
                                 bool verify)
    : name_(std::move(name)), v_(std::move(v)), declared_(std::move(declared)) {
  require(v_ != nullptr, "velocity field: function required");
  measure_slope();
  int top = 0;
  for (const auto& c : declared_) {
    require(c.order >= 1 && c.order <= 10, "velocity field: critical orders must lie in [1, 10]");
    require(c.location >= 0.0 && c.location < 1.0, "velocity field: critical points must lie in [0,1)");
    top = std::max(top, c.order);
  }
  if (!verify || declared_.empty()) return;
  const auto scale = derivative_scales(v_, top + 1);
  for (const auto& c : declared_) {
    const auto d = taylor_derivatives(v_, c.location, c.order + 1);
    for (int j = 1; j <= c.order; ++j)
      require(std::fabs(d[static_cast<std::size_t>(j)]) <= 1e-5 * scale[static_cast<std::size_t>(j)],
              "velocity field '" + name_ + "': derivative " + std::to_string(j) + " does not vanish at " +
                  fmt(c.location));
    const auto q1 = static_cast<std::size_t>(c.order + 1);
    require(std::fabs(d[q1]) > 1e-3 * scale[q1], "velocity field '" + name_ + "': derivative " +
                                                      std::to_string(c.order + 1) + " vanishes at " + fmt(c.location));
  }
}

void VelocityField1D::set_breaks(std::vector<double> b) {
  breaks_ = std::move(b);
  measure_slope();
}

// Midpoint grid, so non-periodic fields are never differenced across 0 = 1.
void VelocityField1D::measure_slope() {
  constexpr double kH = 1e-4;
  max_slope_ = 0.0;
  for (int i = 0; i < 1024; ++i) {
    const double x = (i + 0.5) / 1024.0;
    if (std::any_of(breaks_.begin(), breaks_.end(), [x](double b) { return std::fabs(x - b) < 3 * kH; })) continue;
    max_slope_ = std::max(max_slope_, std::fabs(slope_fd(v_, x, kH)));
  }
  max_slope_ *= 1.1;
}

int VelocityField1D::smoothness() const {
  int top = 0;
  for (const auto& c : declared_) top = std::max(top, c.order);
  return top + 1;
}

std::vector<std::string> catalog_names() { return {"cos", "cos_quartic", "cos_sextic", "linear", "const"}; }

VelocityField1D field_from_catalog(const std::string& name) {
  if (name == "cos") return {name, [](double x) { return std::cos(kTwoPi * x); }, {{0.0, 1}, {0.5, 1}}};
  if (name == "cos_quartic")
    return {name, [](double x) { return std::cos(kTwoPi * x) + 0.25 * std::cos(2 * kTwoPi * x); }, {{0.0, 1}, {0.5, 3}}};
  if (name == "cos_sextic")
    return {name,
            [](double x) {
              return 1.25 * std::cos(kTwoPi * x) + 0.5 * std::cos(2 * kTwoPi * x) + std::cos(3 * kTwoPi * x) / 12.0;
            },
            {{0.0, 1}, {0.5, 5}}};
  if (name == "linear") return {name, [](double x) { return x; }, {}};
  if (name == "const") return {name, [](double) { return 0.5; }, {}};
  throw PreconditionError("unknown velocity field '" + name + "'");
}

VelocityField1D field_from_csv(const std::string& path) {
  struct Piece {
    double x0, x1;
    std::vector<double> c;
  };
  std::vector<Piece> pieces;
  const auto rows = read_csv(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "x0") continue;
    const auto where = path + ":" + std::to_string(i + 1);
    if (r.size() < 3) throw FormatError(where + ": expected x0,x1,c0[,c1,...]");
    Piece p{parse_double(r[0], where), parse_double(r[1], where), {}};
    for (std::size_t k = 2; k < r.size(); ++k) p.c.push_back(parse_double(r[k], where));
    pieces.push_back(std::move(p));
  }
  if (pieces.empty()) throw FormatError(path + ": no pieces");
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.x0 < b.x0; });
  require(pieces.front().x0 == 0.0 && pieces.back().x1 == 1.0, "piecewise field: pieces must cover [0,1)");
  std::vector<double> breaks;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    require(pieces[i].x0 < pieces[i].x1, "piecewise field: empty piece");
    if (i > 0) {
      require(pieces[i].x0 == pieces[i - 1].x1, "piecewise field: pieces must tile [0,1)");
      breaks.push_back(pieces[i].x0);
    }
  }
  auto eval = [](const Piece& p, double x) {
    double acc = 0.0;
    for (auto k = p.c.rbegin(); k != p.c.rend(); ++k) acc = acc * (x - p.x0) + *k;
    return acc;
  };
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const double l = eval(pieces[i - 1], pieces[i].x0), r = eval(pieces[i], pieces[i].x0);
    require(std::fabs(l - r) <= 1e-9 * std::max(1.0, std::fabs(l)),
            "piecewise field: pieces must join continuously at " + fmt(pieces[i].x0));
  }
  auto fn = [pieces, eval](double x) {
    // x = 1 belongs to the last piece so quadrature over [0, 1] sees no jump.
    if (x < 0.0 || x > 1.0) x = frac(x);
    auto it = std::upper_bound(pieces.begin(), pieces.end(), x, [](double v, const Piece& p) { return v < p.x1; });
    if (it == pieces.end()) --it;
    return eval(*it, x);
  };
  VelocityField1D f(path, fn, {}, false);
  f.set_breaks(std::move(breaks));
  return f;
}

PushforwardSpec make_pushforward(Measure1D base, VelocityField1D field, int xi, Wrap wrap) {
  require(xi != 0, "pushforward: xi must be nonzero");
  return PushforwardSpec{std::move(base), std::move(field), xi, wrap};
}

Estimate pushforward_char(const PushforwardSpec& spec, double t, std::size_t n_samples, std::uint64_t seed,
                          Exec exec) {
  require(spec.xi != 0, "pushforward: xi must be nonzero");
  require(std::isfinite(t), "pushforward: t must be finite");
  require(n_samples >= 1, "pushforward: need at least one sample");
  const auto xs = sample(spec.base, seed, n_samples, exec);
  const auto parts = indexed_map<ComplexMoments>(chunk_count(n_samples), exec, [&](std::size_t c) {
    ComplexMoments m;
    const auto r = chunk_range(n_samples, c);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      double s = spec.xi * spec.field(xs[i]);
      if (spec.wrap == Wrap::mod1) {
        s = frac(s);
        if (std::min(s, 1.0 - s) < 1e-12) continue;
      }
      const double ph = kTwoPi * frac(t * s);
      m.add({std::cos(ph), std::sin(ph)});
    }
    return m;
  });
  const auto acc = merge_in_order(parts);
  if (acc.count() == 0) throw DegenerateError("pushforward: every sample lies on the removed zero fiber");
  return acc.estimate();
}

cplx oscillatory_integral(const VelocityField1D& field, int xi, double t, QuadMode mode, const Chart& chart) {
  require(std::isfinite(t) && t >= 0.0, "oscillatory_integral: t must be >= 0");
  require(xi != 0, "oscillatory_integral: xi must be nonzero");
  require(chart.a >= 0.0 && chart.a < chart.b && chart.b <= 1.0, "oscillatory_integral: chart must lie in [0,1]");
  if (t == 0.0 && !chart.weight) return chart.b - chart.a;
  const double scale = t * xi;
  Oscillatory f;
  f.phase = [&field, scale](double x) { return scale * field(x); };
  f.amp = chart.weight;
  f.a = chart.a;
  f.b = chart.b;
  f.breaks = chart.breaks;
  for (double b : field.breaks()) f.breaks.push_back(b);
  for (const auto& c : field.declared()) f.breaks.push_back(c.location);
  if (mode == QuadMode::dense) {
    const double osc = std::fabs(scale) * field.max_slope() * (chart.b - chart.a);
    const auto panels = static_cast<std::size_t>(std::ceil(20.0 * osc)) + 16;
    return dense_integrate(f, panels, 2'000'000, Exec::serial).value;
  }
  return filon_integrate(f).value;
}

cplx pushforward_transform(const PushforwardSpec& spec, double t) {
  require(spec.wrap == Wrap::none, "pushforward_transform: only unwrapped push-forwards are deterministic");
  require(std::isfinite(t), "pushforward_transform: t must be finite");
  if (t < 0.0) return std::conj(pushforward_transform(spec, -t));
  switch (spec.base.kind()) {
    case MeasureKind::uniform:
      return oscillatory_integral(spec.field, spec.xi, t);
    case MeasureKind::density: {
      const auto& base = spec.base;
      const auto cells = base.as<DensityGrid>().values.size();
      Chart chart;
      chart.weight = [&base](double x) { return base.density_at(std::min(x, std::nextafter(1.0, 0.0))); };
      for (std::size_t j = 1; j < cells; ++j) chart.breaks.push_back(static_cast<double>(j) / static_cast<double>(cells));
      if (t == 0.0) return 1.0;
      return oscillatory_integral(spec.field, spec.xi, t, QuadMode::filon, chart);
    }
    case MeasureKind::atomic: {
      cplx acc = 0.0;
      for (const auto& a : spec.base.as<Atomic>().atoms) {
        const double ph = kTwoPi * frac(t * spec.xi * spec.field(a.position));
        acc += a.weight * cplx(std::cos(ph), std::sin(ph));
      }
      return acc;
    }
    default:
      throw PreconditionError("pushforward_transform: base kind '" + to_string(spec.base.kind()) +
                              "' needs the Monte-Carlo estimator");
  }
}

DecayEstimate rajchman_fit(const PushforwardSpec& spec, const EnvelopeGrid& grid, Exec exec) {
  require(grid.t_min >= 1.0 && grid.t_min < grid.t_max, "rajchman_fit: need 1 <= t_min < t_max");
  require(grid.blocks >= 8, "rajchman_fit: need at least 8 blocks");
  return fit_transform([&spec](double t) { return pushforward_transform(spec, t); }, grid, exec);
}

DecayEstimate phase_decay_order(const VelocityField1D& field, int xi, const std::vector<double>& t_grid,
                                std::size_t blocks, const Chart& chart, Exec exec) {
  require(t_grid.size() >= 24, "phase_decay_order: need at least 24 times");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    require(t_grid[i] > 0.0 && (i == 0 || t_grid[i] > t_grid[i - 1]), "phase_decay_order: times must increase from > 0");
  const auto mags = indexed_map<double>(t_grid.size(), exec, [&](std::size_t i) {
    return std::abs(oscillatory_integral(field, xi, t_grid[i], QuadMode::filon, chart));
  });
  return fit_envelope(t_grid, mags, blocks);
}

CriticalScan critical_points_scan(const VelocityField1D& field, int xi, std::size_t grid_size) {
  require(xi != 0, "critical_points_scan: xi must be nonzero");
  require(grid_size >= 8, "critical_points_scan: grid must have at least 8 cells");
  const auto& v = field.fn();
  auto g = [&](double x) { return xi * slope_fd(v, x); };

  constexpr std::size_t kSub = 4;
  const std::size_t n = grid_size * kSub;
  std::vector<double> gs(n);
  double gmax = 0.0, vmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(n);
    gs[j] = g(x);
    gmax = std::max(gmax, std::fabs(gs[j]));
    vmax = std::max(vmax, std::fabs(xi * v(x)));
  }
  CriticalScan out;
  if (gmax <= 1e-9 * std::max(1.0, vmax)) {
    out.degenerate_everywhere = true;
    return out;
  }
  const double zero_tol = 1e-13 * gmax;
  auto sign = [&](double y) { return std::fabs(y) <= zero_tol ? 0 : (y > 0 ? 1 : -1); };

  for (std::size_t cell = 0; cell < grid_size; ++cell) {
    int changes = 0;
    for (std::size_t k = 0; k < kSub; ++k) {
      const std::size_t j = cell * kSub + k;
      if (sign(gs[j]) * sign(gs[(j + 1) % n]) < 0) ++changes;
    }
    if (changes >= 2)
      throw RefinementRequired("critical_points_scan: several critical points near " +
                               fmt(static_cast<double>(cell) / static_cast<double>(grid_size)) +
                               "; increase grid_size");
  }

  // Start at a grid point with a definite sign so zero runs are never split.
  std::size_t j0 = 0;
  while (sign(gs[j0]) == 0) ++j0;
  std::vector<double> roots;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t j = (j0 + step) % n;
    const double x0 = static_cast<double>(j0 + step) / static_cast<double>(n);
    const int s0 = sign(gs[j]), s1 = sign(gs[(j + 1) % n]);
    if (s0 == 0) {
      // Flat stretch around a high-order point: one root at its centre.
      std::size_t run = 1;
      while (sign(gs[(j + run) % n]) == 0) ++run;
      roots.push_back(x0 + 0.5 * static_cast<double>(run - 1) / static_cast<double>(n));
      step += run - 1;
    } else if (s0 * s1 < 0) {
      double lo = x0, hi = x0 + 1.0 / static_cast<double>(n);
      double glo = gs[j];
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (sign(gm) == 0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  for (double& r : roots) r = wrap01(r);
  std::sort(roots.begin(), roots.end());
  std::vector<double> uniq;
  for (double r : roots)
    if (uniq.empty() || r - uniq.back() > 1e-8) uniq.push_back(r);
  if (uniq.size() > 1 && uniq.front() + 1.0 - uniq.back() <= 1e-8) uniq.pop_back();

  const auto scale = derivative_scales(v, kScanOrderCap);
  for (double r : uniq) out.points.push_back({r, estimate_order(taylor_derivatives(v, r, kScanOrderCap), scale)});
  return out;
}

}  // namespace kepshear
