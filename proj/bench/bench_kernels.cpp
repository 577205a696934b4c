// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "kepshear/diophantine.hpp"
#include "kepshear/lie.hpp"
#include "kepshear/phase.hpp"
#include "kepshear/shear.hpp"
#include "kepshear/targets.hpp"

using namespace kepshear;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_BernoulliTransform(benchmark::State& st) {
  const auto m = Measure1D::bernoulli(2.5);
  std::vector<double> ts;
  for (int i = 1; i <= 20000; ++i) ts.push_back(i * 3.7);
  for (auto _ : st) benchmark::DoNotOptimize(char_fn_batch(m, ts, exec_of(st)));
}

void BM_Sampling(benchmark::State& st) {
  const auto m = Measure1D::bernoulli(2.5);
  for (auto _ : st) benchmark::DoNotOptimize(sample(m, 1, 1 << 20, exec_of(st)));
}

void BM_CovarianceMonteCarlo(benchmark::State& st) {
  const auto sys = make_shear_system(Measure1D::uniform(), TimeKind::discrete);
  const auto f = random_sobolev_poly(3, 3.0, 1);
  const std::vector<double> ts{0, 1, 2, 4, 8};
  for (auto _ : st) benchmark::DoNotOptimize(cov_curve_monte_carlo(sys, f, f, ts, 50000, 1, exec_of(st)));
}

void BM_SpectralCurve(benchmark::State& st) {
  const auto sys = make_shear_system(Measure1D::bernoulli(2.5), TimeKind::discrete);
  const auto f1 = random_sobolev_poly(4, 4.0, 1), f2 = random_sobolev_poly(4, 4.0, 2);
  const auto ts = geometric_times(1, 1e5, 1.01, true);
  for (auto _ : st) benchmark::DoNotOptimize(cov_curve_spectral(sys, f1, f2, ts, exec_of(st)));
}

void BM_PhaseDecay(benchmark::State& st) {
  const auto f = field_from_catalog("cos_quartic");
  EnvelopeGrid g;
  g.t_min = 10;
  g.t_max = 1e4;
  g.blocks = 12;
  g.per_block = 4;
  const auto ts = envelope_points(g);
  for (auto _ : st) benchmark::DoNotOptimize(phase_decay_order(f, 1, ts, 12, {}, exec_of(st)));
}

void BM_HitCounting(benchmark::State& st) {
  TargetScheme s;
  s.N_max = 20000;
  for (auto _ : st) benchmark::DoNotOptimize(run_counting(Measure1D::uniform(), s, 32, 1, {20000}, exec_of(st)));
}

void BM_DiophantineCheck(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(
        rajchman_dio_check(Measure1D::bernoulli(2.5), DecayOrder::finite(0.07), 64, 40, 1, 0.5, exec_of(st)));
}

void BM_LieCovariance(benchmark::State& st) {
  LieFlowSpec spec{Measure1D::uniform(), generator_from_catalog("linear")};
  const std::vector<double> ts{0.5, 1, 2, 4, 8};
  for (auto _ : st) benchmark::DoNotOptimize(lie_cov_mc(spec, ts, 100000, 1, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_BernoulliTransform)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sampling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CovarianceMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SpectralCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PhaseDecay)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HitCounting)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiophantineCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LieCovariance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
