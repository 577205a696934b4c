#include "kepshear/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "kepshear/errors.hpp"

namespace kepshear {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// exp(2 i pi f) for f in [0, 1).
cplx unit_phase(double f) { return expi(kTwoPi * f); }

bool is_integer(double t) { return std::isfinite(t) && std::floor(t) == t && std::fabs(t) < 0x1.0p52; }

// (exp(iz) - 1) / (iz), with a Taylor branch near 0.
cplx cell_factor(double z) {
  if (std::fabs(z) < 1e-4) return {1.0 - z * z / 6.0, z / 2.0 - z * z * z / 24.0};
  return (expi(z) - 1.0) / cplx(0.0, z);
}

long long mod_floor(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

cplx density_char(const DensityGrid& d, double t) {
  const auto G = static_cast<long long>(d.values.size());
  const double g = static_cast<double>(G);
  cplx acc = 0.0;
  if (is_integer(t)) {
    const long long r = mod_floor(static_cast<long long>(t), G);
    for (long long j = 0; j < G; ++j)
      acc += d.values[static_cast<std::size_t>(j)] * unit_phase(static_cast<double>(mod_floor(r * j, G)) / g);
  } else {
    for (long long j = 0; j < G; ++j)
      acc += d.values[static_cast<std::size_t>(j)] * unit_phase(frac(t * static_cast<double>(j) / g));
  }
  return acc / g * cell_factor(kTwoPi * t / g);
}

// D[r] = sum_j g_j exp(2 i pi r j / G), exact modular phases.
std::vector<cplx> density_dft(const DensityGrid& d, Exec exec) {
  const auto G = static_cast<long long>(d.values.size());
  return indexed_map<cplx>(d.values.size(), exec, [&](std::size_t r) {
    cplx acc = 0.0;
    for (long long j = 0; j < G; ++j)
      acc += d.values[static_cast<std::size_t>(j)] *
             unit_phase(static_cast<double>(mod_floor(static_cast<long long>(r) * j, G)) / static_cast<double>(G));
    return acc;
  });
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto field = line.substr(b, line.find_first_of(",\r", b) - b);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      if (lineno == 1 && out.empty()) continue;  // header
      throw FormatError(path + ":" + std::to_string(lineno) + ": not a number: " + field);
    }
  }
  return out;
}

}  // namespace

Measure1D Measure1D::uniform() { return Measure1D(UniformTorus{}); }

Measure1D Measure1D::density(std::vector<double> values) {
  require(!values.empty(), "density grid: need at least one cell");
  double sum = 0.0;
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0, "density grid: values must be finite and >= 0");
    sum += v;
  }
  require(std::fabs(sum / static_cast<double>(values.size()) - 1.0) <= 1e-12, "density grid: values must average to 1");
  return Measure1D(DensityGrid{std::move(values)});
}

Measure1D Measure1D::density_normalized(std::vector<double> values) {
  require(!values.empty(), "density grid: need at least one cell");
  double sum = 0.0;
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0, "density grid: values must be finite and >= 0");
    sum += v;
  }
  require(sum > 0.0, "density grid: zero total mass");
  const double scale = static_cast<double>(values.size()) / sum;
  for (double& v : values) v *= scale;
  return Measure1D(DensityGrid{std::move(values)});
}

Measure1D Measure1D::atomic(std::vector<Atom> atoms) {
  require(!atoms.empty(), "atomic measure: need at least one atom");
  double sum = 0.0;
  for (const auto& a : atoms) {
    require(std::isfinite(a.position) && a.position >= 0.0 && a.position < 1.0, "atomic measure: positions in [0,1)");
    require(std::isfinite(a.weight) && a.weight > 0.0 && a.weight <= 1.0, "atomic measure: weights in (0,1]");
    sum += a.weight;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, "atomic measure: weights must sum to 1");
  std::vector<double> pos;
  for (const auto& a : atoms) pos.push_back(a.position);
  std::sort(pos.begin(), pos.end());
  require(std::adjacent_find(pos.begin(), pos.end()) == pos.end(), "atomic measure: positions must be distinct");
  return Measure1D(Atomic{std::move(atoms)});
}

Measure1D Measure1D::bernoulli(double theta) {
  require(std::isfinite(theta) && theta > 2.0, "Bernoulli convolution: theta must exceed 2");
  return Measure1D(BernoulliConvolution{theta});
}

Measure1D Measure1D::empirical(std::vector<double> samples) {
  require(!samples.empty(), "empirical measure: need at least one sample");
  for (double s : samples) require(std::isfinite(s), "empirical measure: samples must be finite");
  return Measure1D(Empirical{std::move(samples)});
}

bool Measure1D::is_nonatomic() const {
  return kind() == MeasureKind::uniform || kind() == MeasureKind::density || kind() == MeasureKind::bernoulli;
}

bool Measure1D::supported_in_unit_interval() const {
  switch (kind()) {
    case MeasureKind::uniform:
    case MeasureKind::density:
    case MeasureKind::atomic:
      return true;
    case MeasureKind::bernoulli:
      return false;
    case MeasureKind::empirical: {
      const auto& s = as<Empirical>().samples;
      return std::all_of(s.begin(), s.end(), [](double x) { return x >= 0.0 && x < 1.0; });
    }
  }
  return false;
}

double Measure1D::density_at(double x) const {
  require(has_density(), "density_at: measure has no density");
  require(x >= 0.0 && x < 1.0, "density_at: x must lie in [0,1)");
  if (kind() == MeasureKind::uniform) return 1.0;
  const auto& v = as<DensityGrid>().values;
  const auto j = std::min(v.size() - 1, static_cast<std::size_t>(x * static_cast<double>(v.size())));
  return v[j];
}

std::string Measure1D::describe() const {
  std::ostringstream os;
  os << "kind=" << to_string(kind());
  switch (kind()) {
    case MeasureKind::density:
      os << ",cells=" << as<DensityGrid>().values.size();
      break;
    case MeasureKind::atomic: {
      os << ",atoms=";
      bool first = true;
      for (const auto& a : as<Atomic>().atoms) {
        os << (first ? "" : ";") << a.position << ":" << a.weight;
        first = false;
      }
      break;
    }
    case MeasureKind::bernoulli:
      os << ",theta=" << as<BernoulliConvolution>().theta;
      break;
    case MeasureKind::empirical:
      os << ",samples=" << as<Empirical>().samples.size();
      break;
    default:
      break;
  }
  return os.str();
}

std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::uniform:
      return "uniform";
    case MeasureKind::density:
      return "density";
    case MeasureKind::atomic:
      return "atomic";
    case MeasureKind::bernoulli:
      return "bernoulli";
    case MeasureKind::empirical:
      return "empirical";
  }
  return "?";
}

double bernoulli_char(double theta, double t) {
  require(std::isfinite(theta) && theta > 2.0, "bernoulli_char: theta must exceed 2");
  require(std::isfinite(t), "bernoulli_char: t must be finite");
  double prod = 1.0;
  double arg = kTwoPi * std::fabs(t) / theta;
  while (arg >= 1e-8) {
    prod *= std::cos(arg);
    arg /= theta;
  }
  return prod;
}

cplx char_fn(const Measure1D& m, double t) {
  require(std::isfinite(t), "char_fn: t must be finite");
  if (t == 0.0) return 1.0;
  switch (m.kind()) {
    case MeasureKind::uniform:
      if (is_integer(t)) return 0.0;
      return cell_factor(kTwoPi * t);
    case MeasureKind::density:
      return density_char(m.as<DensityGrid>(), t);
    case MeasureKind::atomic: {
      cplx acc = 0.0;
      for (const auto& a : m.as<Atomic>().atoms) acc += a.weight * unit_phase(frac(t * a.position));
      return acc;
    }
    case MeasureKind::bernoulli:
      return bernoulli_char(m.as<BernoulliConvolution>().theta, t);
    case MeasureKind::empirical: {
      const auto& s = m.as<Empirical>().samples;
      cplx acc = 0.0;
      for (double x : s) acc += unit_phase(frac(t * x));
      return acc / static_cast<double>(s.size());
    }
  }
  return 0.0;
}

std::vector<cplx> char_fn_batch(const Measure1D& m, const std::vector<double>& ts, Exec exec) {
  for (double t : ts) require(std::isfinite(t), "char_fn: t must be finite");
  if (m.kind() == MeasureKind::density && ts.size() > m.as<DensityGrid>().values.size() &&
      std::all_of(ts.begin(), ts.end(), is_integer)) {
    const auto& d = m.as<DensityGrid>();
    const auto G = static_cast<long long>(d.values.size());
    const auto table = density_dft(d, exec);
    return indexed_map<cplx>(ts.size(), exec, [&](std::size_t i) -> cplx {
      const double t = ts[i];
      if (t == 0.0) return 1.0;
      const auto r = static_cast<std::size_t>(mod_floor(static_cast<long long>(t), G));
      return table[r] / static_cast<double>(G) * cell_factor(kTwoPi * t / static_cast<double>(G));
    });
  }
  return indexed_map<cplx>(ts.size(), exec, [&](std::size_t i) { return char_fn(m, ts[i]); });
}

std::vector<double> sample(const Measure1D& m, std::uint64_t seed, std::size_t n, Exec exec) {
  require(n >= 1, "sample: n must be >= 1");
  std::vector<double> cdf;
  std::vector<double> powers;
  if (m.kind() == MeasureKind::density) {
    const auto& v = m.as<DensityGrid>().values;
    cdf.resize(v.size());
    std::partial_sum(v.begin(), v.end(), cdf.begin());
    for (double& c : cdf) c /= cdf.back();
  } else if (m.kind() == MeasureKind::atomic) {
    for (const auto& a : m.as<Atomic>().atoms) cdf.push_back((cdf.empty() ? 0.0 : cdf.back()) + a.weight);
    for (double& c : cdf) c /= cdf.back();
  } else if (m.kind() == MeasureKind::bernoulli) {
    const double theta = m.as<BernoulliConvolution>().theta;
    powers.resize(kBernoulliTerms);
    for (int k = 0; k < kBernoulliTerms; ++k) powers[static_cast<std::size_t>(k)] = std::pow(theta, -(k + 1));
  }

  std::vector<double> out(n);
  const auto stream = static_cast<std::uint64_t>(m.kind());
  indexed_map<int>(chunk_count(n), exec, [&](std::size_t c) {
    const auto r = chunk_range(n, c);
    auto rng = chunk_rng(seed, stream, c);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      switch (m.kind()) {
        case MeasureKind::uniform:
          out[i] = uniform01(rng);
          break;
        case MeasureKind::density: {
          const double u = uniform01(rng);
          const auto j = std::min<std::size_t>(
              static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), cdf.size() - 1);
          const double lo = j == 0 ? 0.0 : cdf[j - 1];
          const double w = cdf[j] - lo;
          const double within = w > 0.0 ? std::clamp((u - lo) / w, 0.0, 1.0) : 0.5;
          out[i] = std::min((static_cast<double>(j) + within) / static_cast<double>(cdf.size()), std::nextafter(1.0, 0.0));
          break;
        }
        case MeasureKind::atomic: {
          const double u = uniform01(rng);
          const auto j = std::min<std::size_t>(
              static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), cdf.size() - 1);
          out[i] = m.as<Atomic>().atoms[j].position;
          break;
        }
        case MeasureKind::bernoulli: {
          const std::uint64_t bits = rng();
          double x = 0.0;
          for (int k = kBernoulliTerms - 1; k >= 0; --k)
            x += ((bits >> k) & 1u) ? powers[static_cast<std::size_t>(k)] : -powers[static_cast<std::size_t>(k)];
          out[i] = x;
          break;
        }
        case MeasureKind::empirical: {
          const auto& s = m.as<Empirical>().samples;
          out[i] = s[std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng)];
          break;
        }
      }
    }
    return 0;
  });
  return out;
}

DecayEstimate rajchman_fit(const Measure1D& m, const EnvelopeGrid& grid, Exec exec) {
  require(grid.t_min >= 1.0 && grid.t_min < grid.t_max, "rajchman_fit: need 1 <= t_min < t_max");
  require(grid.blocks >= 8, "rajchman_fit: need at least 8 blocks");
  const auto pts = envelope_points(grid);
  const auto vals = char_fn_batch(m, pts, exec);
  std::vector<double> mags(vals.size());
  std::transform(vals.begin(), vals.end(), mags.begin(), [](cplx z) { return std::abs(z); });
  return fit_envelope(pts, mags, grid.blocks);
}

DecayEstimate rajchman_fit(const Measure1D& m, double t_min, double t_max, std::size_t blocks, bool integer_grid,
                           Exec exec) {
  EnvelopeGrid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.blocks = blocks;
  g.integers = integer_grid;
  return rajchman_fit(m, g, exec);
}

double equidistribution_stat(const Measure1D& m, long long n, double a, std::size_t n_samples, std::uint64_t seed,
                             Exec exec) {
  require(n >= 1, "equidistribution_stat: n must be >= 1");
  require(std::isfinite(a) && a > 0.0, "equidistribution_stat: a must be > 0");
  auto xs = sample(m, seed, n_samples, exec);
  const double scale = static_cast<double>(n) / a;
  for (double& x : xs) x = frac(scale * x);
  return ks_uniform(std::move(xs));
}

std::vector<double> load_density_csv(const std::string& path) {
  auto v = read_numbers(path);
  if (v.empty()) throw FormatError(path + ": no density values");
  return v;
}

Measure1D parse_measure_spec(const std::string& spec) {
  std::string kind;
  double theta = 0.0;
  std::string grid_file, samples_file, density_name, atoms;
  std::size_t cells = 1024;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    require(eq != std::string::npos, "measure spec: expected key=value, got '" + item + "'");
    const auto key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      if (key == "kind") kind = val;
      else if (key == "theta") theta = std::stod(val);
      else if (key == "grid_file") grid_file = val;
      else if (key == "samples_file") samples_file = val;
      else if (key == "density") density_name = val;
      else if (key == "cells") cells = static_cast<std::size_t>(std::stoul(val));
      else if (key == "atoms") atoms = val;
      else throw PreconditionError("measure spec: unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const PreconditionError*>(&e)) throw;
      throw PreconditionError("measure spec: bad value for '" + key + "'");
    }
  }
  if (kind.empty()) kind = !grid_file.empty() || !density_name.empty() ? "density" : "uniform";

  if (kind == "uniform") return Measure1D::uniform();
  if (kind == "bernoulli") return Measure1D::bernoulli(theta);
  if (kind == "density") {
    if (!grid_file.empty()) return Measure1D::density_normalized(load_density_csv(grid_file));
    require(density_name.empty() || density_name == "cos", "measure spec: unknown density '" + density_name + "'");
    require(cells >= 1, "measure spec: cells must be >= 1");
    return Measure1D::density_from([](double x) { return 1.0 + std::cos(kTwoPi * x); }, cells);
  }
  if (kind == "atomic") {
    require(!atoms.empty(), "measure spec: atomic kind needs atoms=pos:weight;...");
    std::vector<Atom> list;
    std::stringstream as(atoms);
    std::string a;
    while (std::getline(as, a, ';')) {
      const auto colon = a.find(':');
      try {
        if (colon == std::string::npos) list.push_back({std::stod(a), 1.0});
        else list.push_back({std::stod(a.substr(0, colon)), std::stod(a.substr(colon + 1))});
      } catch (const std::logic_error&) {
        throw PreconditionError("measure spec: bad atom '" + a + "'");
      }
    }
    return Measure1D::atomic(std::move(list));
  }
  if (kind == "empirical") {
    require(!samples_file.empty(), "measure spec: empirical kind needs samples_file");
    return Measure1D::empirical(read_numbers(samples_file));
  }
  throw PreconditionError("measure spec: unknown kind '" + kind + "'");
}

}  // namespace kepshear
