// kepshear: command-line driver. Every command writes a CSV table and a JSON
// summary (config, version, seed, results, timestamp).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kepshear/csv.hpp"
#include "kepshear/diophantine.hpp"
#include "kepshear/errors.hpp"
#include "kepshear/lie.hpp"
#include "kepshear/observables.hpp"
#include "kepshear/phase.hpp"
#include "kepshear/shear.hpp"
#include "kepshear/targets.hpp"

using json = nlohmann::ordered_json;
using namespace kepshear;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitFail = 3;
constexpr int kExitUsage = 64;

const std::vector<std::string> kCommands{"char",     "rajchman-fit",  "equidist", "cov",       "decay-fit",
                                         "bound-check", "phase",       "critical-scan", "borel-cantelli", "mstp",
                                         "cf",       "dio",           "rajchman-dio", "lie-cov",   "lie-reduce"};

// Output of one command, turned into the JSON summary by main().
struct Report {
  json results = json::object();
  std::optional<std::string> verdict;
  std::vector<std::string> warnings;
  int exit_code = kExitOk;
};

struct Common {
  std::string out;
  std::string summary;
  std::uint64_t seed = 1;
  bool serial = false;

  Exec exec() const { return serial ? Exec::serial : Exec::parallel; }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out,-o", c.out, "CSV output path (default <command>.csv)");
  sub->add_option("--summary", c.summary, "JSON summary path (default: CSV path with .json)");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_flag("--serial", c.serial, "use the serial reference kernels");
}

// Time grids: explicit --t list, a geometric grid when --ratio > 1, else the
// block-uniform log grid used by the envelope fits.
struct Grid {
  std::vector<double> t;
  double t_min = 1.0;
  double t_max = 1e4;
  double ratio = 0.0;
  std::size_t blocks = 16;
  std::size_t per_block = 256;
  bool integers = false;

  EnvelopeGrid envelope() const {
    EnvelopeGrid g;
    g.t_min = t_min;
    g.t_max = t_max;
    g.blocks = blocks;
    g.per_block = per_block;
    g.integers = integers;
    return g;
  }

  std::vector<double> points() const {
    if (!t.empty()) return t;
    if (ratio > 0.0) return geometric_times(t_min, t_max, ratio, integers);
    return envelope_points(envelope());
  }
};

void add_grid(CLI::App* sub, Grid& g) {
  sub->add_option("--t", g.t, "explicit times (overrides the grid)")->delimiter(',');
  sub->add_option("--t-min", g.t_min, "first time");
  sub->add_option("--t-max", g.t_max, "last time");
  sub->add_option("--ratio", g.ratio, "geometric ratio (> 1); 0 selects the block grid");
  sub->add_option("--blocks", g.blocks, "log-spaced blocks for the envelope fit");
  sub->add_option("--per-block", g.per_block, "points per block");
  sub->add_flag("--integers", g.integers, "integer times");
}

json order_json(const DecayOrder& o) {
  if (o.is_infinite()) return "inf";
  return o.value();
}

DecayOrder parse_order(const std::string& s) {
  if (s == "inf" || s == "+inf") return DecayOrder::infinite();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && used > 0, "expected a decay order or 'inf', got '" + s + "'");
  return DecayOrder::finite(v);
}

json fit_json(const DecayEstimate& e) {
  return {{"order", order_json(e.order)},
          {"intercept", e.intercept},
          {"residual_rms", e.residual_rms},
          {"blocks", e.block_count}};
}

void write_envelope_csv(const DecayEstimate& e, const std::string& path) {
  CsvWriter w(path, {"t", "envelope"});
  for (std::size_t i = 0; i < e.freqs.size(); ++i) w.row({fmt(e.freqs[i]), fmt(e.envelope[i])});
}

void write_values_csv(const std::vector<double>& ts, const std::vector<cplx>& v, const std::string& path) {
  CsvWriter w(path, {"t", "re", "im", "abs"});
  for (std::size_t i = 0; i < ts.size(); ++i) w.row({fmt(ts[i]), fmt(v[i].real()), fmt(v[i].imag()), fmt(std::abs(v[i]))});
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Default r estimate for a base measure: integer-grid fit on [1, 1e5].
DecayOrder fitted_rajchman_order(const Measure1D& m, Exec exec) {
  return rajchman_fit(m, 1.0, 1e5, 24, true, exec).order;
}

VelocityField1D load_field(const std::string& name, const std::string& csv) {
  if (!csv.empty()) return field_from_csv(csv);
  return field_from_catalog(name);
}

Vec3 parse_axis(const std::vector<double>& a) {
  require(a.size() == 3, "--axis needs three components");
  return Vec3(a[0], a[1], a[2]);
}

MatrixIndex parse_index(const std::vector<int>& v, const char* flag) {
  require(v.size() == 2, std::string(flag) + " needs row,col");
  return {v[0], v[1]};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Option values as JSON, numbers when they parse as numbers.
json option_value(const CLI::Option* opt) {
  auto scalar = [](const std::string& s) -> json {
    if (s.empty()) return s;
    char* end = nullptr;
    const long long i = std::strtoll(s.c_str(), &end, 10);
    if (end && *end == '\0') return i;
    const double v = std::strtod(s.c_str(), &end);
    if (end && *end == '\0' && std::isfinite(v)) return v;
    return s;
  };
  std::vector<std::string> vals = opt->results();
  if (vals.empty()) {
    std::string d = opt->get_default_str();
    if (d.size() >= 2 && d.front() == '[' && d.back() == ']') {
      json arr = json::array();
      std::string body = d.substr(1, d.size() - 2), item;
      std::stringstream ss(body);
      while (std::getline(ss, item, ',')) arr.push_back(scalar(item));
      return arr;
    }
    return scalar(d);
  }
  if (opt->get_items_expected_max() > 1 || vals.size() > 1) {
    json arr = json::array();
    for (const auto& v : vals) arr.push_back(scalar(v));
    return arr;
  }
  return scalar(vals.front());
}

json config_of(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (name == "serial" || name == "integers") cfg[name] = opt->count() > 0;
    else cfg[name] = option_value(opt);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keplerian shear experiments on torus bundles and compact group extensions", "kepshear"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(KEPSHEAR_VERSION));
  int threads = 0;
  if (const char* env = std::getenv("KEPSHEAR_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "cap on worker threads (default: $KEPSHEAR_THREADS or all cores)");
  app.require_subcommand(1);

  Common common;
  std::map<std::string, std::function<Report()>> runners;
  auto command = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    return sub;
  };

  // char
  std::string measure_spec;
  std::map<std::string, Grid> grids;
  {
    auto& g = grids["char"];
    auto* sub = command("char", "Fourier transform table of a base measure");
    sub->add_option("--measure", measure_spec, "measure spec, e.g. kind=bernoulli,theta=2.5")->required();
    add_grid(sub, g);
    runners["char"] = [&] {
      const auto m = parse_measure_spec(measure_spec);
      const auto ts = g.points();
      const auto v = char_fn_batch(m, ts, common.exec());
      write_values_csv(ts, v, common.out);
      Report r;
      r.results = {{"measure", m.describe()}, {"points", ts.size()}, {"max_abs", max_abs(v)}};
      return r;
    };
  }

  // rajchman-fit
  std::string field_name, field_csv;
  int xi = 1;
  {
    auto& g = grids["rajchman-fit"];
    auto* sub = command("rajchman-fit", "Envelope fit of |mu^(t)| (or of a push-forward with --field)");
    sub->add_option("--measure", measure_spec, "measure spec")->required();
    sub->add_option("--field", field_name, "velocity field for a push-forward (catalog name)");
    sub->add_option("--field-csv", field_csv, "piecewise polynomial velocity field");
    sub->add_option("--xi", xi, "frequency of the push-forward");
    add_grid(sub, g);
    runners["rajchman-fit"] = [&] {
      const auto m = parse_measure_spec(measure_spec);
      require(g.t.empty() && g.ratio == 0.0, "rajchman-fit uses the block grid (--t-min/--t-max/--blocks)");
      DecayEstimate e;
      if (field_name.empty() && field_csv.empty()) {
        e = rajchman_fit(m, g.envelope(), common.exec());
      } else {
        const auto spec = make_pushforward(m, load_field(field_name, field_csv), xi, Wrap::none);
        e = rajchman_fit(spec, g.envelope(), common.exec());
      }
      write_envelope_csv(e, common.out);
      Report r;
      r.results = fit_json(e);
      r.results["measure"] = m.describe();
      return r;
    };
  }

  // equidist
  std::vector<long long> equi_n{1, 10, 100, 1000, 10000};
  double equi_a = 1.0;
  std::size_t samples = 100000;
  {
    auto* sub = command("equidist", "KS distance of frac(n x / a) from uniform, x ~ measure");
    sub->add_option("--measure", measure_spec, "measure spec")->required();
    sub->add_option("--n", equi_n, "multipliers")->delimiter(',');
    sub->add_option("--a", equi_a, "scale a > 0");
    sub->add_option("--samples", samples, "samples per statistic");
    runners["equidist"] = [&] {
      const auto m = parse_measure_spec(measure_spec);
      CsvWriter w(common.out, {"n", "ks"});
      json stats = json::array();
      for (long long n : equi_n) {
        const double d = equidistribution_stat(m, n, equi_a, samples, common.seed, common.exec());
        w.row({std::to_string(n), fmt(d)});
        stats.push_back(d);
      }
      Report r;
      r.results = {{"measure", m.describe()}, {"ks", stats}};
      return r;
    };
  }

  // cov
  std::string f1_path, f2_path, time_kind = "discrete", method = "spectral", save_poly;
  int random_radius = 0;
  double random_s = 3.0;
  {
    auto& g = grids["cov"];
    g.t_max = 64;
    auto* sub = command("cov", "Expected conditional covariance curve (spectral or Monte-Carlo)");
    sub->add_option("--measure", measure_spec, "base measure spec")->required();
    sub->add_option("--f1", f1_path, "observable CSV (k1,k2,re,im)");
    sub->add_option("--f2", f2_path, "second observable CSV (default: f1)");
    sub->add_option("--random-radius", random_radius, "use a random Sobolev polynomial of this support radius");
    sub->add_option("--random-s", random_s, "Sobolev order of the random polynomial");
    sub->add_option("--save-poly", save_poly, "write the random polynomial to this CSV");
    sub->add_option("--time", time_kind, "discrete or continuous")->check(CLI::IsMember({"discrete", "continuous"}));
    sub->add_option("--method", method, "spectral or mc")->check(CLI::IsMember({"spectral", "mc"}));
    sub->add_option("--samples", samples, "Monte-Carlo samples");
    add_grid(sub, g);
    runners["cov"] = [&] {
      const auto kind = time_kind == "discrete" ? TimeKind::discrete : TimeKind::continuous;
      const auto sys = make_shear_system(parse_measure_spec(measure_spec), kind);
      TrigPoly2 f1, f2;
      if (random_radius > 0) {
        require(f1_path.empty(), "--f1 and --random-radius are exclusive");
        f1 = random_sobolev_poly(random_radius, random_s, common.seed);
        f1 = f1 * cplx(1.0 / hs_norm(f1, random_s));
        if (!save_poly.empty()) write_trigpoly_csv(f1, save_poly);
      } else {
        require(!f1_path.empty(), "cov needs --f1 or --random-radius");
        f1 = read_trigpoly_csv(f1_path);
      }
      f2 = f2_path.empty() ? f1 : read_trigpoly_csv(f2_path);
      if (kind == TimeKind::discrete) g.integers = true;
      auto ts = g.points();
      if (kind == TimeKind::discrete)
        for (double t : ts) require(t == std::floor(t), "discrete time needs integer times");
      const auto curve = method == "spectral"
                             ? cov_curve_spectral(sys, f1, f2, ts, common.exec())
                             : cov_curve_monte_carlo(sys, f1, f2, ts, samples, common.seed, common.exec());
      write_curve_csv(curve, common.out);
      Report r;
      r.results = {{"measure", sys.base.describe()},
                   {"points", ts.size()},
                   {"max_abs", max_abs(curve.values)},
                   {"f1_terms", f1.size()},
                   {"f2_terms", f2.size()},
                   {"f1_hs_norm", hs_norm(f1, random_s)},
                   {"f1_hs0_norm", hs0_norm(f1, random_s)}};
      return r;
    };
  }

  // decay-fit
  std::string curve_path;
  std::size_t fit_blocks = 16;
  {
    auto* sub = command("decay-fit", "Envelope fit of a covariance curve CSV");
    sub->add_option("--curve", curve_path, "curve CSV (t,re,im,stderr)")->required();
    sub->add_option("--fit-blocks", fit_blocks, "log-spaced blocks");
    runners["decay-fit"] = [&] {
      const auto e = decay_fit(read_curve_csv(curve_path), fit_blocks);
      write_envelope_csv(e, common.out);
      Report r;
      r.results = fit_json(e);
      return r;
    };
  }

  // bound-check
  double sobolev_s = 3.0, tol = 0.15;
  std::string r_text;
  {
    auto* sub = command("bound-check", "Check a fitted covariance order against min{s/2-1, r} and r");
    sub->add_option("--curve", curve_path, "curve CSV (t,re,im,stderr)")->required();
    sub->add_option("--s", sobolev_s, "Sobolev order of the observables")->required();
    sub->add_option("--r", r_text, "Rajchman order of the base ('inf' allowed)");
    sub->add_option("--measure", measure_spec, "fit r from this measure when --r is absent");
    sub->add_option("--fit-blocks", fit_blocks, "log-spaced blocks");
    sub->add_option("--tol", tol, "tolerance on both bounds");
    runners["bound-check"] = [&] {
      require(!r_text.empty() || !measure_spec.empty(), "bound-check needs --r or --measure");
      const DecayOrder rr = !r_text.empty() ? parse_order(r_text)
                                            : fitted_rajchman_order(parse_measure_spec(measure_spec), common.exec());
      const auto gamma = decay_fit(read_curve_csv(curve_path), fit_blocks).order;
      const auto b = bound_check(gamma, sobolev_s, rr, tol);
      CsvWriter w(common.out, {"gamma", "s", "r", "lower", "upper", "verdict"});
      w.row({gamma.str(), fmt(sobolev_s), rr.str(), fmt(b.lower), b.upper_active ? fmt(b.upper) : "inf",
             to_string(b.verdict)});
      Report r;
      r.results = {{"gamma", order_json(gamma)},
                   {"r", order_json(rr)},
                   {"lower", b.lower},
                   {"upper", b.upper_active ? json(b.upper) : json("inf")},
                   {"tol", b.tol}};
      r.verdict = to_string(b.verdict);
      if (b.verdict == Verdict::fail_lower || b.verdict == Verdict::fail_upper) r.exit_code = kExitFail;
      return r;
    };
  }

  // phase
  std::string quad_mode = "filon";
  {
    auto& g = grids["phase"];
    g.t_min = 10;
    g.blocks = 12;
    g.per_block = 16;
    auto* sub = command("phase", "Oscillatory integrals of exp(2 i pi t xi v(x)) and their decay order");
    sub->add_option("--field", field_name, "catalog field (cos, cos_quartic, cos_sextic, linear, const)");
    sub->add_option("--field-csv", field_csv, "piecewise polynomial velocity field");
    sub->add_option("--xi", xi, "frequency");
    sub->add_option("--mode", quad_mode, "filon or dense")->check(CLI::IsMember({"filon", "dense"}));
    add_grid(sub, g);
    runners["phase"] = [&] {
      require(!field_name.empty() || !field_csv.empty(), "phase needs --field or --field-csv");
      const auto f = load_field(field_name, field_csv);
      const auto ts = g.points();
      const auto mode = quad_mode == "dense" ? QuadMode::dense : QuadMode::filon;
      const auto v = indexed_map<cplx>(ts.size(), common.exec(),
                                       [&](std::size_t i) { return oscillatory_integral(f, xi, ts[i], mode); });
      write_values_csv(ts, v, common.out);
      Report r;
      r.results = {{"field", f.name()}, {"points", ts.size()}, {"smoothness", f.smoothness()}};
      if (ts.size() >= 24 && ts.front() > 0.0) {
        std::vector<double> mags(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
        const auto e = fit_envelope(ts, mags, std::min<std::size_t>(g.blocks, ts.size() / 2));
        r.results["fit"] = fit_json(e);
        r.results["predicted_order"] = 1.0 / f.smoothness();
      } else {
        r.warnings.push_back("fewer than 24 positive times: no decay fit");
      }
      return r;
    };
  }

  // critical-scan
  std::size_t scan_grid = 1024;
  {
    auto* sub = command("critical-scan", "Critical points of xi v and their orders");
    sub->add_option("--field", field_name, "catalog field");
    sub->add_option("--field-csv", field_csv, "piecewise polynomial velocity field");
    sub->add_option("--xi", xi, "frequency");
    sub->add_option("--grid", scan_grid, "scan cells");
    runners["critical-scan"] = [&] {
      require(!field_name.empty() || !field_csv.empty(), "critical-scan needs --field or --field-csv");
      const auto f = load_field(field_name, field_csv);
      const auto scan = critical_points_scan(f, xi, scan_grid);
      CsvWriter w(common.out, {"location", "order"});
      int top = 0;
      for (const auto& p : scan.points) {
        w.row({fmt(p.location), std::to_string(p.order)});
        top = std::max(top, p.order);
      }
      Report r;
      r.results = {{"field", f.name()},
                   {"degenerate_everywhere", scan.degenerate_everywhere},
                   {"count", scan.points.size()},
                   {"smoothness", top + 1}};
      return r;
    };
  }

  // borel-cantelli
  TargetScheme scheme;
  std::size_t orbits = 100;
  std::vector<std::size_t> checkpoints;
  {
    auto* sub = command("borel-cantelli", "Shrinking-target hit counts along transvection orbits");
    sub->add_option("--measure", measure_spec, "base measure spec (default kind=uniform)");
    sub->add_option("--C", scheme.C, "radius constant");
    sub->add_option("--p", scheme.p, "radius exponent in [0, 1)");
    sub->add_option("--N", scheme.N_max, "orbit length");
    sub->add_option("--orbits", orbits, "number of orbits");
    sub->add_option("--checkpoints", checkpoints, "checkpoints (default: powers of 10 and N)")->delimiter(',');
    runners["borel-cantelli"] = [&] {
      const auto base = parse_measure_spec(measure_spec.empty() ? "kind=uniform" : measure_spec);
      auto cps = checkpoints;
      if (cps.empty()) {
        for (std::size_t n = 10; n < scheme.N_max; n *= 10) cps.push_back(n);
        cps.push_back(scheme.N_max);
      }
      const auto h = run_counting(base, scheme, orbits, common.seed, cps, common.exec());
      write_hits_csv(h, common.out);
      const std::size_t last = cps.size() - 1;
      const double N = static_cast<double>(cps[last]);
      const double allowed = 20.0 * std::sqrt(N) * std::pow(std::log(N), 1.5);
      const double ratio = h.ratio_mean(last), dev = h.max_deviation(last);
      Report r;
      r.results = {{"N", cps[last]},
                   {"expectation", h.expectation[last]},
                   {"ratio_mean", ratio},
                   {"ratio_stderr", h.ratio_stderr(last)},
                   {"max_deviation", dev},
                   {"thresholds", {{"ratio_band", {0.95, 1.05}}, {"max_deviation", allowed}}}};
      r.warnings = h.warnings;
      const bool ok = ratio >= 0.95 && ratio <= 1.05 && dev <= allowed;
      r.verdict = ok ? "PASS" : "FAIL";
      if (!ok) r.exit_code = kExitFail;
      return r;
    };
  }

  // mstp
  std::string alpha_text = "golden";
  double mstp_s = 1.0, mstp_C = 1.0, growth = 0.5;
  std::size_t points = 1000;
  {
    auto* sub = command("mstp", "Monotone shrinking targets for the rotation by alpha");
    sub->add_option("--alpha", alpha_text, "rotation number (p/q, sqrt:c, golden, liouville[:n] or decimal)");
    sub->add_option("--s", mstp_s, "radius exponent 1/s");
    sub->add_option("--C", mstp_C, "radius constant");
    sub->add_option("--points", points, "starting points");
    sub->add_option("--N", scheme.N_max, "orbit length");
    sub->add_option("--growth-threshold", growth, "fraction of the expected late hits");
    runners["mstp"] = [&] {
      const double alpha = frac(parse_real(alpha_text).mid().convert_to<double>());
      const auto res = mstp_experiment(alpha, mstp_s, mstp_C, points, scheme.N_max, common.seed, growth, common.exec());
      CsvWriter w(common.out, {"point_id", "late_hits"});
      for (std::size_t i = 0; i < res.late_counts.size(); ++i) w.row({std::to_string(i), std::to_string(res.late_counts[i])});
      Report r;
      r.results = {{"alpha", alpha},
                   {"fraction", res.fraction},
                   {"expected_late", res.expected_late},
                   {"growth_threshold", res.growth_threshold}};
      return r;
    };
  }

  // cf
  std::string x_text;
  std::size_t depth = 40;
  unsigned bits = 512;
  {
    auto* sub = command("cf", "Certified continued fraction expansion");
    sub->add_option("--x", x_text, "real (p/q, sqrt:c, golden, liouville[:n] or decimal)")->required();
    sub->add_option("--depth", depth, "maximum number of quotients");
    sub->add_option("--bits", bits, "precision for surds");
    runners["cf"] = [&] {
      const auto cf = cf_expand(parse_real(x_text, bits), depth);
      CsvWriter w(common.out, {"k", "a", "p", "q"});
      for (std::size_t k = 0; k < cf.depth(); ++k)
        w.row({std::to_string(k), cf.a[k].str(), cf.p[k].str(), cf.q[k].str()});
      Report r;
      r.results = {{"depth", cf.depth()}, {"rational", cf.rational}, {"precision_exhausted", cf.precision_exhausted}};
      if (cf.precision_exhausted) r.warnings.push_back("bracket precision exhausted before the requested depth");
      return r;
    };
  }

  // dio
  {
    auto* sub = command("dio", "Diophantine exponent estimate from the continued fraction");
    sub->add_option("--x", x_text, "real (p/q, sqrt:c, golden, liouville[:n] or decimal)")->required();
    sub->add_option("--depth", depth, "maximum number of quotients");
    sub->add_option("--bits", bits, "precision for surds");
    runners["dio"] = [&] {
      const auto e = dio_estimate(cf_expand(parse_real(x_text, bits), depth));
      CsvWriter w(common.out, {"k", "s_k", "e_k"});
      for (std::size_t i = 0; i < e.levels.size(); ++i) w.row({std::to_string(e.levels[i]), fmt(e.s[i]), fmt(e.exponent[i])});
      Report r;
      r.results = {{"estimate", e.verdict == DioVerdict::diverging ? json("inf") : json(e.estimate)},
                   {"deep_half_max", e.estimate},
                   {"classification", to_string(e.verdict)},
                   {"records", e.records},
                   {"depth_used", e.depth_used},
                   {"precision_exhausted", e.precision_exhausted}};
      return r;
    };
  }

  // rajchman-dio
  double margin = 0.5, max_fraction = 0.05;
  std::size_t dio_samples = 200;
  {
    auto* sub = command("rajchman-dio", "Fraction of samples whose Diophantine exponent exceeds max(1/r - 1, 1) + margin");
    sub->add_option("--measure", measure_spec, "measure spec")->required();
    sub->add_option("--r", r_text, "Rajchman order ('inf' allowed; fitted when absent)");
    sub->add_option("--samples", dio_samples, "samples");
    sub->add_option("--depth", depth, "continued fraction depth");
    sub->add_option("--margin", margin, "margin above the bound");
    sub->add_option("--max-fraction", max_fraction, "largest accepted violation fraction");
    runners["rajchman-dio"] = [&] {
      const auto m = parse_measure_spec(measure_spec);
      const DecayOrder rr = r_text.empty() ? fitted_rajchman_order(m, common.exec()) : parse_order(r_text);
      const auto chk = rajchman_dio_check(m, rr, dio_samples, depth, common.seed, margin, common.exec());
      CsvWriter w(common.out, {"sample", "estimate", "depth", "classification"});
      for (std::size_t i = 0; i < chk.estimates.size(); ++i)
        w.row({std::to_string(i), fmt(chk.estimates[i].estimate), std::to_string(chk.estimates[i].depth_used),
               to_string(chk.estimates[i].verdict)});
      Report r;
      r.results = {{"r", order_json(rr)},     {"bound", chk.bound},           {"vacuous", chk.vacuous},
                   {"samples", chk.samples}, {"usable", chk.usable},         {"violations", chk.violations},
                   {"violation_fraction", chk.violation_fraction}, {"max_fraction", max_fraction}};
      const bool ok = chk.usable > 0 && chk.violation_fraction <= max_fraction;
      if (chk.usable == 0) r.warnings.push_back("no sample produced 5 certified quotients");
      r.verdict = ok ? "PASS" : "FAIL";
      if (!ok) r.exit_code = kExitFail;
      return r;
    };
  }

  // lie-cov / lie-reduce
  std::string generator = "linear", group = "so3";
  std::vector<double> axis{0, 0, 1};
  std::vector<int> first{0, 0}, second{0, 0};
  auto lie_spec = [&] {
    LieFlowSpec spec{parse_measure_spec(measure_spec.empty() ? "kind=uniform" : measure_spec),
                     generator_from_catalog(generator, parse_axis(axis)), parse_index(first, "--first"),
                     parse_index(second, "--second"), group == "su2" ? LieGroup::su2 : LieGroup::so3};
    validate(spec);
    return spec;
  };
  auto add_lie = [&](CLI::App* sub, Grid& g) {
    sub->add_option("--measure", measure_spec, "base measure spec (default kind=uniform)");
    sub->add_option("--generator", generator, "linear, zero, cos, cos_quartic, cos_sextic or tilt");
    sub->add_option("--axis", axis, "rotation axis (unit vector)")->delimiter(',')->expected(3);
    add_grid(sub, g);
  };
  {
    auto& g = grids["lie-cov"];
    g.t_max = 8;
    g.blocks = 8;
    g.per_block = 8;
    auto* sub = command("lie-cov", "Monte-Carlo matrix-coefficient covariance on T x SO(3)");
    add_lie(sub, g);
    sub->add_option("--first", first, "row,col of the first coefficient (0-based)")->delimiter(',')->expected(2);
    sub->add_option("--second", second, "row,col of the second coefficient (0-based)")->delimiter(',')->expected(2);
    sub->add_option("--group", group, "so3 or su2")->check(CLI::IsMember({"so3", "su2"}));
    sub->add_option("--samples", samples, "Monte-Carlo samples");
    runners["lie-cov"] = [&] {
      const auto spec = lie_spec();
      const auto ts = g.points();
      const auto res = lie_cov_mc(spec, ts, samples, common.seed, common.exec());
      CsvWriter w(common.out, {"t", "re", "im", "stderr", "prediction"});
      for (std::size_t i = 0; i < ts.size(); ++i)
        w.row({fmt(ts[i]), fmt(res.mc.values[i].real()), fmt(res.mc.values[i].imag()), fmt(res.mc.stderrs[i]),
               res.prediction.empty() ? "" : fmt(res.prediction[i])});
      Report r;
      r.results = {{"points", ts.size()}, {"has_prediction", !res.prediction.empty()}};
      if (!res.prediction.empty()) {
        double gap = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) gap = std::max(gap, std::abs(res.mc.values[i] - res.prediction[i]));
        r.results["max_gap_to_prediction"] = gap;
      }
      std::size_t positive = 0;
      for (double t : ts) positive += t > 0.0;
      if (positive >= 16 && positive == ts.size()) r.results["fit"] = fit_json(decay_fit(res.mc, g.blocks));
      return r;
    };
  }
  {
    auto& g = grids["lie-reduce"];
    g.t_max = 8;
    g.blocks = 8;
    g.per_block = 8;
    auto* sub = command("lie-reduce", "Rajchman fit of the orbit-torus push-forward of a fixed-axis field");
    add_lie(sub, g);
    runners["lie-reduce"] = [&] {
      const auto red = orbit_torus_reduce(lie_spec());
      require(g.t.empty() && g.ratio == 0.0, "lie-reduce uses the block grid (--t-min/--t-max/--blocks)");
      const auto e = rajchman_fit(red, g.envelope(), common.exec());
      write_envelope_csv(e, common.out);
      Report r;
      r.results = fit_json(e);
      return r;
    };
  }

  // An unknown or missing command is a usage error (64), not a parse error.
  {
    std::string first_word;
    bool wants_help = false;
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--help" || a == "-h" || a == "--version") wants_help = true;
      if (a == "--threads") {
        ++i;
        continue;
      }
      if (a.rfind("--threads=", 0) == 0) continue;
      if (!a.empty() && a[0] != '-') {
        first_word = a;
        break;
      }
    }
    const bool known = std::find(kCommands.begin(), kCommands.end(), first_word) != kCommands.end();
    if (!known && !(wants_help && first_word.empty())) {
      if (!first_word.empty()) std::cerr << "unknown command '" << first_word << "'\n\n";
      std::cerr << app.help();
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  set_thread_limit(threads);
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (common.out.empty()) common.out = name + ".csv";
  if (common.summary.empty()) {
    const auto dot = common.out.rfind('.');
    const auto slash = common.out.rfind('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    common.summary = (has_ext ? common.out.substr(0, dot) : common.out) + ".json";
  }

  Report report;
  try {
    report = runners.at(name)();
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const FormatError& e) {
    std::cerr << "input: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitPrecondition;
  }

  json summary;
  summary["command"] = name;
  summary["version"] = KEPSHEAR_VERSION;
  summary["seed"] = common.seed;
  summary["threads"] = thread_limit();
  summary["timestamp"] = utc_timestamp();
  summary["csv"] = common.out;
  summary["config"] = config_of(sub);
  summary["config"]["out"] = common.out;
  summary["config"]["summary"] = common.summary;
  summary["results"] = report.results;
  if (report.verdict) summary["verdict"] = *report.verdict;
  summary["warnings"] = report.warnings;
  std::ofstream out(common.summary);
  if (!out) {
    std::cerr << "cannot write " << common.summary << "\n";
    return kExitPrecondition;
  }
  out << summary.dump(2) << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (report.verdict) std::cout << *report.verdict << "\n";
  return report.exit_code;
}
