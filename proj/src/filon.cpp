#include "kepshear/filon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[static_cast<std::size_t>(i)] = x;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

cplx cis_cycles(double p) {
  const double f = p - std::floor(p);
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

double amp_at(const Oscillatory& f, double x) { return f.amp ? f.amp(x) : 1.0; }

std::vector<double> partition(const Oscillatory& f, std::size_t pieces) {
  std::vector<double> edges;
  for (std::size_t i = 0; i <= pieces; ++i) edges.push_back(f.a + (f.b - f.a) * static_cast<double>(i) / pieces);
  for (double x : f.breaks)
    if (x > f.a && x < f.b) edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

struct Panel {
  double lo, hi;
};

class FilonSolver {
 public:
  FilonSolver(const Oscillatory& f, const FilonOptions& o) : f_(f), opt_(o), gl_(gauss_legendre(64)) {}

  QuadResult run() {
    double amp_scale = 0.0;
    for (int i = 0; i <= 256; ++i) amp_scale = std::max(amp_scale, std::fabs(amp_at(f_, f_.a + (f_.b - f_.a) * i / 256.0)));
    amp_tol_ = opt_.tol * std::max(amp_scale, 1e-300);
    const auto edges = partition(f_, opt_.initial_panels);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += panel({edges[i], edges[i + 1]}, 0);
    return {total, count_};
  }

 private:
  cplx direct(double c, double H) const {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < gl_.nodes.size(); ++j) {
      const double x = c + H * gl_.nodes[j];
      acc += gl_.weights[j] * amp_at(f_, x) * cis_cycles(f_.phase(x));
    }
    return acc * H;
  }

  cplx panel(Panel p, int depth) {
    if (++count_ > opt_.panel_budget) throw BudgetError("filon: panel budget exceeded");
    const double H = 0.5 * (p.hi - p.lo), c = 0.5 * (p.hi + p.lo);
    const double pl = f_.phase(p.lo), pc = f_.phase(c), ph = f_.phase(p.hi);
    // Quadratic model in radians: P(s) = P0 + B s + G s^2 on s in [-1, 1].
    const double B = kTwoPi * 0.5 * (ph - pl);
    const double G = kTwoPi * (0.5 * (ph + pl) - pc);
    const double al = amp_at(f_, p.lo), ac = amp_at(f_, c), ah = amp_at(f_, p.hi);
    const double a1 = 0.5 * (ah - al), a2 = 0.5 * (ah + al) - ac;

    if (std::fabs(B) + std::fabs(G) <= 24.0) return direct(c, H);

    double perr = 0.0, aerr = 0.0;
    for (double s : {-0.5, 0.5}) {
      const double x = c + H * s;
      perr = std::max(perr, std::fabs(kTwoPi * (f_.phase(x) - pc) - (B * s + G * s * s)));
      aerr = std::max(aerr, std::fabs(amp_at(f_, x) - (ac + a1 * s + a2 * s * s)));
    }
    const bool model_ok = perr <= opt_.tol && aerr <= amp_tol_ && std::fabs(G) <= 1.0 && std::fabs(B) > 40.0;
    if (!model_ok) {
      if (depth > 60 || H < 1e-14 * std::max(1.0, std::fabs(c))) throw BudgetError("filon: panel refinement stalled");
      return panel({p.lo, c}, depth + 1) + panel({c, p.hi}, depth + 1);
    }

    // exp(i G s^2) = sum_m (i G)^m s^{2m} / m!, truncated once terms drop below 1e-17.
    int mmax = 0;
    for (double term = 1.0; term > 1e-17; term *= std::fabs(G) / mmax) ++mmax;
    const auto mu = exp_moments(B, 2 * mmax + 2);
    cplx acc = 0.0, coef = 1.0;
    for (int m = 0; m <= mmax; ++m) {
      const auto k = static_cast<std::size_t>(2 * m);
      acc += coef * (ac * mu[k] + a1 * mu[k + 1] + a2 * mu[k + 2]);
      coef *= cplx(0.0, G) / static_cast<double>(m + 1);
    }
    return H * cis_cycles(pc) * acc;
  }

  const Oscillatory& f_;
  const FilonOptions& opt_;
  const GaussRule& gl_;
  double amp_tol_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace

const GaussRule& gauss_legendre(int n) {
  require(n >= 1 && n <= 512, "gauss_legendre: order must lie in [1, 512]");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

std::vector<cplx> exp_moments(double B, int kmax) {
  require(kmax >= 0, "exp_moments: kmax must be >= 0");
  require(B != 0.0, "exp_moments: B must be nonzero");
  std::vector<cplx> mu(static_cast<std::size_t>(kmax) + 1);
  const cplx ep(std::cos(B), std::sin(B));
  const cplx em = std::conj(ep);
  const cplx iB(0.0, B);
  mu[0] = 2.0 * std::sin(B) / B;
  for (int k = 1; k <= kmax; ++k) {
    const cplx boundary = (k % 2 == 0) ? (ep - em) : (ep + em);
    mu[static_cast<std::size_t>(k)] = (boundary - static_cast<double>(k) * mu[static_cast<std::size_t>(k - 1)]) / iB;
  }
  return mu;
}

QuadResult filon_integrate(const Oscillatory& f, const FilonOptions& opt) {
  require(f.phase != nullptr, "filon: phase function required");
  require(std::isfinite(f.a) && std::isfinite(f.b) && f.a < f.b, "filon: need a < b");
  require(opt.tol > 0.0 && opt.initial_panels >= 1, "filon: bad options");
  FilonSolver solver(f, opt);
  return solver.run();
}

QuadResult dense_integrate(const Oscillatory& f, std::size_t panels, std::size_t budget, Exec exec) {
  require(f.phase != nullptr, "dense quadrature: phase function required");
  require(std::isfinite(f.a) && std::isfinite(f.b) && f.a < f.b, "dense quadrature: need a < b");
  require(panels >= 1, "dense quadrature: need at least one panel");
  const auto pieces = partition(f, 1);
  const std::size_t total = panels * (pieces.size() - 1);
  if (total > budget)
    throw BudgetError("dense quadrature: " + std::to_string(total) + " panels exceed the budget of " +
                      std::to_string(budget) + "; use filon mode");
  const auto& gl = gauss_legendre(10);
  constexpr std::size_t kPanelChunk = 1024;
  const std::size_t chunks = (total + kPanelChunk - 1) / kPanelChunk;
  const auto parts = indexed_map<cplx>(chunks, exec, [&](std::size_t ci) {
    cplx acc = 0.0;
    for (std::size_t q = ci * kPanelChunk; q < std::min(total, (ci + 1) * kPanelChunk); ++q) {
      const std::size_t piece = q / panels, j = q % panels;
      const double lo = pieces[piece], hi = pieces[piece + 1];
      const double w = (hi - lo) / static_cast<double>(panels);
      const double c = lo + w * (static_cast<double>(j) + 0.5), H = 0.5 * w;
      cplx pacc = 0.0;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double x = c + H * gl.nodes[k];
        pacc += gl.weights[k] * amp_at(f, x) * cis_cycles(f.phase(x));
      }
      acc += pacc * H;
    }
    return acc;
  });
  cplx sum = 0.0;
  for (const auto& p : parts) sum += p;
  return {sum, total};
}

}  // namespace kepshear
